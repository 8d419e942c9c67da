//! Word-read accounting for decoders.
//!
//! Every access to label storage goes through [`load`], which models a word
//! RAM machine with a small register file: a 64-bit word that is already held
//! in one of [`REGISTERS`] slots is free, anything else costs one read. Table
//! probes can additionally be traced so tests can see which bits a decoder
//! actually consulted.

use std::cell::{Cell, RefCell};

pub const REGISTERS: usize = 4;

thread_local! {
    static READS: Cell<u64> = const { Cell::new(0) };
    static REGS: Cell<[(usize, usize); REGISTERS]> = const { Cell::new([(0, usize::MAX); REGISTERS]) };
    static NEXT: Cell<usize> = const { Cell::new(0) };
    static TRACE: RefCell<Option<Vec<(usize, usize)>>> = const { RefCell::new(None) };
}

/// Clears the read counter and the register file.
pub fn reset() {
    READS.with(|r| r.set(0));
    REGS.with(|r| r.set([(0, usize::MAX); REGISTERS]));
    NEXT.with(|c| c.set(0));
}

/// Word reads charged since the last [`reset`] on this thread.
pub fn word_reads() -> u64 {
    READS.with(Cell::get)
}

#[inline]
pub(crate) fn load(buffer: usize, word: usize) {
    REGS.with(|regs| {
        let mut file = regs.get();
        if file.iter().any(|&(b, w)| b == buffer && w == word) {
            return;
        }
        let slot = NEXT.with(|c| {
            let s = c.get();
            c.set((s + 1) % REGISTERS);
            s
        });
        file[slot] = (buffer, word);
        regs.set(file);
        READS.with(|r| r.set(r.get() + 1));
    });
}

/// Starts recording `(buffer id, bit offset)` for every table-bit probe.
pub fn start_trace() {
    TRACE.with(|t| *t.borrow_mut() = Some(Vec::new()));
}

/// Stops recording and returns the probes seen since [`start_trace`].
pub fn take_trace() -> Vec<(usize, usize)> {
    TRACE.with(|t| t.borrow_mut().take().unwrap_or_default())
}

#[inline]
pub(crate) fn table_probe(buffer: usize, bit: usize) {
    TRACE.with(|t| {
        if let Some(log) = t.borrow_mut().as_mut() {
            log.push((buffer, bit));
        }
    });
}
