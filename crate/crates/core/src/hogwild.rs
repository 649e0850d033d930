use std::sync::atomic::{AtomicU64, Ordering};

/// Shared `f64` storage for lock-free SGD.
///
/// Every element is an `AtomicU64` holding the bit pattern of an `f64`, read
/// and written with relaxed ordering. Updates are a load followed by a store,
/// not an atomic read-modify-write: concurrent writers to the same element
/// may lose updates, which Hogwild training accepts as noise. On common
/// targets relaxed loads and stores compile to plain moves.
pub struct HogwildBuffer {
    data: Box<[AtomicU64]>,
}

impl HogwildBuffer {
    pub fn zeros(len: usize) -> Self {
        HogwildBuffer {
            data: (0..len).map(|_| AtomicU64::new(0f64.to_bits())).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        f64::from_bits(self.data[i].load(Ordering::Relaxed))
    }

    #[inline]
    pub fn set(&self, i: usize, value: f64) {
        self.data[i].store(value.to_bits(), Ordering::Relaxed);
    }

    #[inline]
    pub fn add(&self, i: usize, delta: f64) {
        self.set(i, self.get(i) + delta);
    }

    pub fn read_into(&self, offset: usize, out: &mut [f64]) {
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.get(offset + k);
        }
    }

    pub fn to_vec(&self, offset: usize, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        self.read_into(offset, &mut out);
        out
    }
}

impl Clone for HogwildBuffer {
    fn clone(&self) -> Self {
        HogwildBuffer {
            data: self.data.iter().map(|a| AtomicU64::new(a.load(Ordering::Relaxed))).collect(),
        }
    }
}

impl std::fmt::Debug for HogwildBuffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HogwildBuffer").field("len", &self.len()).finish()
    }
}
