"""Small shared helpers: seed derivation, hashing, text formatting."""

import hashlib

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x):
    """One step of the splitmix64 generator; returns a well-mixed 64-bit value."""
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master, index):
    """Deterministic per-stream 64-bit seed from a master seed and a stream index.

    Stream seeds are independent of how many streams run or in what order.
    """
    return splitmix64((master + (index + 1) * _GOLDEN) & _MASK64)


def nonzero_seed(seed):
    # xorshift state must not be zero
    return seed if seed != 0 else 0x1234567887654321


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def sha256_text(text):
    return hashlib.sha256(text.encode()).hexdigest()


def fmt_float(x):
    """Shortest round-tripping decimal form of a float."""
    return repr(float(x))
