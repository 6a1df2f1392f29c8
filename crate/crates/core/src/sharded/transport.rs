//! In-process message passing between shards, with a per-operation trace.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

/// Counts for one logical operation (a gate, a reduction, a sampling round).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub label: String,
    pub messages: usize,
    pub bytes: usize,
}

/// Append-only trace shared by a state and all its clones.
#[derive(Debug, Clone, Default)]
pub struct MessageLog {
    entries: Arc<Mutex<Vec<TraceEntry>>>,
}

impl MessageLog {
    pub fn entries(&self) -> Vec<TraceEntry> {
        self.lock().clone()
    }

    pub fn last(&self) -> Option<TraceEntry> {
        self.lock().last().cloned()
    }

    pub fn total_messages(&self) -> usize {
        self.lock().iter().map(|e| e.messages).sum()
    }

    pub fn total_bytes(&self) -> usize {
        self.lock().iter().map(|e| e.bytes).sum()
    }

    pub fn clear(&self) {
        self.lock().clear();
    }

    pub(crate) fn record(&self, entry: TraceEntry) {
        self.lock().push(entry);
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Vec<TraceEntry>> {
        self.entries.lock().unwrap_or_else(|e| e.into_inner())
    }
}

/// Payloads a shard can send.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Amplitudes(Vec<Complex64>),
    Reals(Vec<f64>),
    Indices(Vec<usize>),
}

impl Payload {
    pub fn bytes(&self) -> usize {
        match self {
            Payload::Amplitudes(v) => std::mem::size_of_val(v.as_slice()),
            Payload::Reals(v) => std::mem::size_of_val(v.as_slice()),
            Payload::Indices(v) => std::mem::size_of_val(v.as_slice()),
        }
    }
}

/// Point-to-point mailboxes for one logical operation. Dropping or calling
/// [`Exchange::finish`] records the operation's counts in the log.
pub(crate) struct Exchange<'a> {
    log: &'a MessageLog,
    label: String,
    boxes: HashMap<(usize, usize), VecDeque<Payload>>,
    messages: usize,
    bytes: usize,
}

impl<'a> Exchange<'a> {
    pub(crate) fn new(log: &'a MessageLog, label: impl Into<String>) -> Self {
        Exchange {
            log,
            label: label.into(),
            boxes: HashMap::new(),
            messages: 0,
            bytes: 0,
        }
    }

    pub(crate) fn send(&mut self, from: usize, to: usize, payload: Payload) {
        debug_assert_ne!(from, to, "a shard does not message itself");
        self.messages += 1;
        self.bytes += payload.bytes();
        self.boxes.entry((from, to)).or_default().push_back(payload);
    }

    pub(crate) fn recv(&mut self, from: usize, to: usize) -> Payload {
        self.boxes
            .get_mut(&(from, to))
            .and_then(VecDeque::pop_front)
            .unwrap_or_else(|| panic!("shard {to} expected a message from shard {from}"))
    }

    pub(crate) fn recv_amplitudes(&mut self, from: usize, to: usize) -> Vec<Complex64> {
        match self.recv(from, to) {
            Payload::Amplitudes(v) => v,
            other => panic!("expected amplitudes, got {other:?}"),
        }
    }

    pub(crate) fn recv_reals(&mut self, from: usize, to: usize) -> Vec<f64> {
        match self.recv(from, to) {
            Payload::Reals(v) => v,
            other => panic!("expected reals, got {other:?}"),
        }
    }

    pub(crate) fn recv_indices(&mut self, from: usize, to: usize) -> Vec<usize> {
        match self.recv(from, to) {
            Payload::Indices(v) => v,
            other => panic!("expected indices, got {other:?}"),
        }
    }

    pub(crate) fn finish(self) {}
}

impl Drop for Exchange<'_> {
    fn drop(&mut self) {
        debug_assert!(
            self.boxes.values().all(VecDeque::is_empty) || std::thread::panicking(),
            "undelivered messages in `{}`",
            self.label
        );
        self.log.record(TraceEntry {
            label: std::mem::take(&mut self.label),
            messages: self.messages,
            bytes: self.bytes,
        });
    }
}
