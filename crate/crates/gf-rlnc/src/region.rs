//! Aligned, block-sized byte buffers for the region kernels.
//!
//! Every kernel in this crate walks memory in whole 64-byte blocks: one
//! 512-bit vector register, or a short run of smaller loads. [`Region`]
//! guarantees the two properties that make tail handling unnecessary: the
//! base address is 64-byte aligned and the length is a multiple of 64.
//! Construction pads with zero bytes, which packs the zero word in every
//! field and is therefore invisible to multiply-and-add.

use std::alloc::{alloc_zeroed, dealloc, handle_alloc_error, Layout};
use std::fmt;
use std::ops::{Deref, DerefMut};
use std::ptr::NonNull;

use rand_core::RngCore;

/// Bytes per kernel block. Also the required base alignment of a [`Region`].
pub const BLOCK_BYTES: usize = 64;

/// A heap buffer whose address and length are both multiples of
/// [`BLOCK_BYTES`]. Dereferences to `[u8]`.
pub struct Region {
    ptr: NonNull<u8>,
    len: usize,
}

// The region uniquely owns its allocation, like Vec<u8>.
unsafe impl Send for Region {}
unsafe impl Sync for Region {}

impl Region {
    /// Smallest multiple of [`BLOCK_BYTES`] that holds `len` bytes.
    pub const fn padded_len(len: usize) -> usize {
        len.div_ceil(BLOCK_BYTES) * BLOCK_BYTES
    }

    /// Zero-filled region of `padded_len(len)` bytes.
    pub fn zeroed(len: usize) -> Region {
        let len = Region::padded_len(len);
        let layout = Region::layout(len);
        // SAFETY: layout has nonzero size (at least one block is allocated
        // even for an empty region, see `layout`).
        let raw = unsafe { alloc_zeroed(layout) };
        let Some(ptr) = NonNull::new(raw) else { handle_alloc_error(layout) };
        Region { ptr, len }
    }

    /// Copy of `bytes`, zero-padded up to the next block boundary.
    pub fn from_bytes(bytes: &[u8]) -> Region {
        let mut region = Region::zeroed(bytes.len());
        region[..bytes.len()].copy_from_slice(bytes);
        region
    }

    /// Overwrite the whole region with bytes from `rng`. Any byte pattern
    /// packs valid words for every field, so this produces uniform packed
    /// payloads.
    pub fn fill_random(&mut self, rng: &mut impl RngCore) {
        rng.fill_bytes(self.as_mut_slice());
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_slice(&self) -> &[u8] {
        // SAFETY: ptr is valid for len bytes and uniquely owned.
        unsafe { std::slice::from_raw_parts(self.ptr.as_ptr(), self.len) }
    }

    pub fn as_mut_slice(&mut self) -> &mut [u8] {
        // SAFETY: ptr is valid for len bytes and uniquely owned.
        unsafe { std::slice::from_raw_parts_mut(self.ptr.as_ptr(), self.len) }
    }

    // Zero-length regions still get one block so the base pointer is a real,
    // aligned allocation and Drop stays uniform.
    fn layout(len: usize) -> Layout {
        Layout::from_size_align(len.max(BLOCK_BYTES), BLOCK_BYTES)
            .expect("region layout is valid")
    }
}

impl Drop for Region {
    fn drop(&mut self) {
        // SAFETY: allocated in `zeroed` with the identical layout.
        unsafe { dealloc(self.ptr.as_ptr(), Region::layout(self.len)) }
    }
}

impl Clone for Region {
    fn clone(&self) -> Region {
        let mut copy = Region::zeroed(self.len);
        copy.as_mut_slice().copy_from_slice(self.as_slice());
        copy
    }
}

impl Deref for Region {
    type Target = [u8];

    fn deref(&self) -> &[u8] {
        self.as_slice()
    }
}

impl DerefMut for Region {
    fn deref_mut(&mut self) -> &mut [u8] {
        self.as_mut_slice()
    }
}

impl PartialEq for Region {
    fn eq(&self, other: &Region) -> bool {
        self.as_slice() == other.as_slice()
    }
}

impl Eq for Region {}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Region").field("len", &self.len).finish_non_exhaustive()
    }
}

impl From<&[u8]> for Region {
    fn from(bytes: &[u8]) -> Region {
        Region::from_bytes(bytes)
    }
}
