use alloc::string::String;
use core::fmt::Write;
use sha2::{Digest, Sha256};

/// Short stable identifier: `prefix` followed by the first 8 digest bytes
/// in hex. Parts are length-prefixed so `["ab", "c"]` and `["a", "bc"]`
/// hash differently.
pub(crate) fn short_id(prefix: &str, parts: &[&str]) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part.as_bytes());
    }
    let digest = hasher.finalize();
    let mut out = String::with_capacity(prefix.len() + 16);
    out.push_str(prefix);
    for byte in &digest[..8] {
        let _ = write!(out, "{byte:02x}");
    }
    out
}
