//! Stream record parsing: JSONL (`{"tag": ..., "value": ...}` per line)
//! and two-column CSV with a `tag,value` header.
//!
//! Records are yielded lazily so evaluation stays one-pass; the first
//! parse or validation failure stops the stream and is reported through a
//! shared error slot.

use std::cell::RefCell;
use std::io::BufRead;
use std::rc::Rc;

use streamcra::cra::Cra;
use streamcra::value::Value;

use crate::{Failure, StreamFormat};

pub type ErrorSlot = Rc<RefCell<Option<Failure>>>;

pub struct RecordStream<'m> {
    reader: Box<dyn BufRead>,
    format: StreamFormat,
    machine: &'m Cra,
    line_no: usize,
    header_done: bool,
    error: ErrorSlot,
    finished: bool,
}

impl<'m> RecordStream<'m> {
    pub fn new(
        reader: Box<dyn BufRead>,
        format: StreamFormat,
        machine: &'m Cra,
    ) -> (RecordStream<'m>, ErrorSlot) {
        let error: ErrorSlot = Rc::new(RefCell::new(None));
        (
            RecordStream {
                reader,
                format,
                machine,
                line_no: 0,
                header_done: format != StreamFormat::Csv,
                error: error.clone(),
                finished: false,
            },
            error,
        )
    }

    fn fail(&mut self, f: Failure) -> Option<(String, Value)> {
        *self.error.borrow_mut() = Some(f);
        self.finished = true;
        None
    }

    fn next_line(&mut self) -> Option<Result<String, std::io::Error>> {
        let mut buf = String::new();
        match self.reader.read_line(&mut buf) {
            Ok(0) => None,
            Ok(_) => {
                self.line_no += 1;
                while buf.ends_with('\n') || buf.ends_with('\r') {
                    buf.pop();
                }
                Some(Ok(buf))
            }
            Err(e) => Some(Err(e)),
        }
    }
}

impl Iterator for RecordStream<'_> {
    type Item = (String, Value);

    fn next(&mut self) -> Option<(String, Value)> {
        if self.finished {
            return None;
        }
        loop {
            let line = match self.next_line() {
                None => return None,
                Some(Err(e)) => return self.fail(Failure::Io(e.to_string())),
                Some(Ok(line)) => line,
            };
            if !self.header_done {
                self.header_done = true;
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols != ["tag", "value"] {
                    return self.fail(Failure::Io(format!(
                        "CSV header must be `tag,value`, got `{line}`"
                    )));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let no = self.line_no;
            let (tag, raw) = match self.format {
                StreamFormat::Jsonl => {
                    let v: serde_json::Value = match serde_json::from_str(&line) {
                        Ok(v) => v,
                        Err(e) => {
                            return self.fail(Failure::Io(format!("line {no}: {e}")))
                        }
                    };
                    let Some(tag) = v.get("tag").and_then(|t| t.as_str()).map(String::from)
                    else {
                        return self.fail(Failure::Io(format!("line {no}: missing `tag`")));
                    };
                    (tag, v.get("value").cloned().unwrap_or(serde_json::Value::Null))
                }
                StreamFormat::Csv => {
                    let Some((tag, value)) = line.split_once(',') else {
                        return self
                            .fail(Failure::Io(format!("line {no}: expected `tag,value`")));
                    };
                    let value = value.trim();
                    let raw = if value.is_empty() {
                        serde_json::Value::Null
                    } else {
                        serde_json::Value::from(value)
                    };
                    (tag.trim().to_string(), raw)
                }
            };
            if self.machine.alphabet.index_of(&tag).is_none() {
                return self.fail(Failure::Semantic(format!(
                    "line {no}: tag `{tag}` is outside the machine alphabet"
                )));
            }
            match self.machine.registry.parse_value(&raw) {
                Ok(value) => return Some((tag, value)),
                Err(e) => return self.fail(Failure::Semantic(format!("line {no}: {e}"))),
            }
        }
    }
}
