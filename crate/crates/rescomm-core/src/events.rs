//! Discrete-event queue with deterministic tie-breaking.
//!
//! Events pop in nondecreasing delivery time; equal times pop in insertion
//! order, which makes simultaneous deliveries reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Debug, Clone)]
struct Entry<S, T> {
    t_deliver: S,
    seq: u64,
    payload: T,
}

impl<S: Real, T> PartialEq for Entry<S, T> {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl<S: Real, T> Eq for Entry<S, T> {}

impl<S: Real, T> Ord for Entry<S, T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want earliest first.
        other
            .t_deliver
            .partial_cmp(&self.t_deliver)
            .expect("finite delivery times")
            .then_with(|| other.seq.cmp(&self.seq))
    }
}
impl<S: Real, T> PartialOrd for Entry<S, T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
pub struct EventQueue<S, T> {
    heap: BinaryHeap<Entry<S, T>>,
    next_seq: u64,
}

impl<S: Real, T> Default for EventQueue<S, T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Real, T> EventQueue<S, T> {
    pub fn new() -> Self {
        EventQueue {
            heap: BinaryHeap::new(),
            next_seq: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn push(&mut self, t_deliver: S, payload: T) -> Result<()> {
        if !t_deliver.is_finite() {
            return Err(Error::RejectedInput("event delivery time not finite".into()));
        }
        self.heap.push(Entry {
            t_deliver,
            seq: self.next_seq,
            payload,
        });
        self.next_seq += 1;
        Ok(())
    }

    /// Delivery time of the earliest pending event.
    pub fn peek_time(&self) -> Option<S> {
        self.heap.peek().map(|e| e.t_deliver)
    }

    pub fn pop(&mut self) -> Option<(S, T)> {
        self.heap.pop().map(|e| (e.t_deliver, e.payload))
    }

    /// Pop every event with t_deliver <= horizon, in order.
    pub fn drain_until(&mut self, horizon: S) -> Vec<(S, T)> {
        let mut out = Vec::new();
        while let Some(t) = self.peek_time() {
            if t > horizon {
                break;
            }
            out.push(self.pop().unwrap());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_in_time_order() {
        let mut q = EventQueue::new();
        q.push(3.0f64, "c").unwrap();
        q.push(1.0, "a").unwrap();
        q.push(2.0, "b").unwrap();
        assert_eq!(q.pop().unwrap().1, "a");
        assert_eq!(q.pop().unwrap().1, "b");
        assert_eq!(q.pop().unwrap().1, "c");
    }

    #[test]
    fn ties_break_by_insertion_order() {
        let mut q = EventQueue::new();
        q.push(1.0f64, 10).unwrap();
        q.push(1.0, 11).unwrap();
        q.push(1.0, 12).unwrap();
        let order: Vec<i32> = std::iter::from_fn(|| q.pop()).map(|(_, p)| p).collect();
        assert_eq!(order, vec![10, 11, 12]);
    }

    #[test]
    fn drain_until_respects_horizon() {
        let mut q = EventQueue::new();
        for t in [0.5f64, 1.5, 2.5] {
            q.push(t, t).unwrap();
        }
        let drained = q.drain_until(2.0);
        assert_eq!(drained.len(), 2);
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn rejects_non_finite_time() {
        let mut q = EventQueue::new();
        assert!(q.push(f64::NAN, ()).is_err());
    }
}
