"""Link encryption and message authentication for MAC frames.

DES (FIPS 46-3) in CBC mode carries the payload; authentication is the
chained-block construction over the same cipher:

    O_1 = E(K_mac, D_1)
    O_j = E(K_mac, D_j xor O_(j-1))        j = 2..N
    tag = leftmost M bits of O_N,          16 <= M <= 64

i.e. CBC-MAC with a zero IV, over the padded plaintext.  Frames are
MAC-then-encrypt: the tag block is appended to the padded plaintext and
everything is CBC-encrypted under a distinct traffic key, per-frame IV
in the clear.

Padding is one 1-bit then 0-bits to the block boundary, then one full
block carrying the payload byte count (big-endian); it is applied even
when the payload already fills a block, so removal is unambiguous.

Wire format, big-endian throughout:

    [2 bytes: total block count N][8 bytes: IV][N x 8 bytes: ciphertext]

Keys are 8-byte DES keys supplied out of band (hex on the CLI); nothing
in this module ever logs or prints key material.
"""
from __future__ import annotations

import hmac
from dataclasses import dataclass

import numpy as np

from secphy import _kernels
from secphy._destables import key_schedule

BLOCK_BYTES = 8
MIN_TAG_BITS = 16
MAX_TAG_BITS = 64
DEFAULT_TAG_BITS = 32


class AuthFailure(Exception):
    """Tag mismatch: the frame is rejected before padding is touched."""


class PaddingError(Exception):
    """Malformed padding on an authenticated frame."""


class FrameFormatError(ValueError):
    """Wire bytes that do not parse as a secured frame."""


class BlockCipher:
    """64-bit block cipher interface the CBC/MAC layer runs on."""

    block_bytes = BLOCK_BYTES

    def encrypt_block(self, block: int) -> int:
        raise NotImplementedError

    def decrypt_block(self, block: int) -> int:
        raise NotImplementedError


class DesCipher(BlockCipher):
    """FIPS 46-3 DES; the schedule is fixed at construction."""

    def __init__(self, key: bytes):
        self._subkeys = key_schedule(key)

    @property
    def subkeys(self) -> list[int]:
        return list(self._subkeys)

    def encrypt_block(self, block: int) -> int:
        return _kernels.des_encrypt_block(block, self._subkeys)

    def decrypt_block(self, block: int) -> int:
        return _kernels.des_decrypt_block(block, self._subkeys)


def des_encrypt_block(block: bytes, key: bytes) -> bytes:
    """One-shot ECB encryption of a single 8-byte block."""
    v = _to_block(block)
    return DesCipher(key).encrypt_block(v).to_bytes(8, "big")


def des_decrypt_block(block: bytes, key: bytes) -> bytes:
    v = _to_block(block)
    return DesCipher(key).decrypt_block(v).to_bytes(8, "big")


def _to_block(b: bytes) -> int:
    if len(b) != BLOCK_BYTES:
        raise ValueError(f"block must be {BLOCK_BYTES} bytes")
    return int.from_bytes(b, "big")


def _to_u64_array(data: bytes) -> np.ndarray:
    if len(data) % BLOCK_BYTES:
        raise ValueError("data must be a whole number of 8-byte blocks")
    return np.frombuffer(data, dtype=">u8").astype(np.uint64)


def _from_u64_array(arr: np.ndarray) -> bytes:
    return arr.astype(">u8").tobytes()


def cbc_encrypt(plaintext: bytes, key: bytes, iv: bytes) -> bytes:
    """CBC over whole blocks: C_j = E(K, C_(j-1) xor P_j), C_0 = IV."""
    blocks = _to_u64_array(plaintext)
    ct = _kernels.cbc_encrypt_u64(blocks, key_schedule(key), _to_block(iv))
    return _from_u64_array(ct)


def cbc_decrypt(ciphertext: bytes, key: bytes, iv: bytes) -> bytes:
    blocks = _to_u64_array(ciphertext)
    pt = _kernels.cbc_decrypt_u64(blocks, key_schedule(key), _to_block(iv))
    return _from_u64_array(pt)


def compute_dac(data: bytes, key: bytes, tag_bits: int = DEFAULT_TAG_BITS) -> int:
    """Chained authentication code: leftmost tag_bits of the CBC-MAC.

    `data` must already be block-aligned (the frame layer pads first).
    Returned as an int holding the leftmost bits of the final chaining
    value, i.e. tag == O_N >> (64 - tag_bits).
    """
    if not MIN_TAG_BITS <= tag_bits <= MAX_TAG_BITS:
        raise ValueError(f"tag_bits must be in [{MIN_TAG_BITS}, {MAX_TAG_BITS}]")
    blocks = _to_u64_array(data)
    if len(blocks) == 0:
        raise ValueError("cannot authenticate an empty block sequence")
    o_n = _kernels.cbc_mac_u64(blocks, key_schedule(key))
    return int(o_n) >> (64 - tag_bits)


def pad_payload(payload: bytes) -> bytes:
    """10* padding to the block boundary plus a length block."""
    pad_len = BLOCK_BYTES - (len(payload) % BLOCK_BYTES)
    padded = payload + b"\x80" + b"\x00" * (pad_len - 1)
    return padded + len(payload).to_bytes(BLOCK_BYTES, "big")


def unpad_payload(padded: bytes) -> bytes:
    if len(padded) < 2 * BLOCK_BYTES or len(padded) % BLOCK_BYTES:
        raise PaddingError("padded payload too short")
    length = int.from_bytes(padded[-BLOCK_BYTES:], "big")
    body = padded[:-BLOCK_BYTES]
    if length >= len(body):
        raise PaddingError("length block exceeds padded body")
    tail = body[length:]
    if tail[0] != 0x80 or any(tail[1:]):
        raise PaddingError("bad 10* padding")
    return body[:length]


@dataclass(frozen=True)
class SecuredFrame:
    """Encrypted MAC PDU: per-frame IV plus CBC ciphertext (tag inside)."""

    iv: bytes
    ciphertext: bytes
    tag_bits: int = DEFAULT_TAG_BITS

    def __post_init__(self):
        if len(self.iv) != BLOCK_BYTES:
            raise FrameFormatError("IV must be 8 bytes")
        if len(self.ciphertext) % BLOCK_BYTES or not self.ciphertext:
            raise FrameFormatError("ciphertext must be whole blocks")
        if not MIN_TAG_BITS <= self.tag_bits <= MAX_TAG_BITS:
            raise FrameFormatError("tag_bits out of range")

    @property
    def n_blocks(self) -> int:
        return len(self.ciphertext) // BLOCK_BYTES

    def to_wire(self) -> bytes:
        return (self.n_blocks.to_bytes(2, "big") + self.iv + self.ciphertext)

    @classmethod
    def from_wire(cls, data: bytes, tag_bits: int = DEFAULT_TAG_BITS) -> "SecuredFrame":
        if len(data) < 2 + BLOCK_BYTES:
            raise FrameFormatError("frame shorter than its header")
        n = int.from_bytes(data[:2], "big")
        need = 2 + BLOCK_BYTES + n * BLOCK_BYTES
        if n == 0 or len(data) < need:
            raise FrameFormatError(
                f"header claims {n} blocks but only {len(data)} bytes present")
        iv = data[2:2 + BLOCK_BYTES]
        ct = data[2 + BLOCK_BYTES:need]
        return cls(iv=iv, ciphertext=ct, tag_bits=tag_bits)

    def wire_size(self) -> int:
        return 2 + BLOCK_BYTES + len(self.ciphertext)


def sealed_size(payload_len: int) -> int:
    """Wire bytes for a payload of the given length."""
    n_data = (payload_len // BLOCK_BYTES) + 2    # 10* block + length block
    return 2 + BLOCK_BYTES + (n_data + 1) * BLOCK_BYTES


def max_payload_for(capacity: int) -> int:
    """Largest payload whose sealed frame fits in `capacity` bytes."""
    n_total = (capacity - 2 - BLOCK_BYTES) // BLOCK_BYTES
    n_data = n_total - 1
    if n_data < 2:
        raise ValueError(f"capacity {capacity} cannot hold any sealed frame")
    return (n_data - 1) * BLOCK_BYTES - 1


def seal_frame(payload: bytes, enc_key: bytes, mac_key: bytes, iv: bytes,
               tag_bits: int = DEFAULT_TAG_BITS) -> SecuredFrame:
    """Authenticate then encrypt one MAC PDU.

    The tag is computed over the padded plaintext under mac_key, placed
    left-aligned in its own block, and the whole thing is CBC-encrypted
    under enc_key.  The two keys must differ: CBC-MAC under the CBC
    encryption key lets ciphertext splices forge tags.
    """
    if enc_key == mac_key:
        raise ValueError("enc_key and mac_key must be distinct")
    padded = pad_payload(payload)
    tag = compute_dac(padded, mac_key, tag_bits)
    tag_block = (tag << (64 - tag_bits)).to_bytes(BLOCK_BYTES, "big")
    ciphertext = cbc_encrypt(padded + tag_block, enc_key, iv)
    return SecuredFrame(iv=iv, ciphertext=ciphertext, tag_bits=tag_bits)


def open_frame(frame: SecuredFrame, enc_key: bytes, mac_key: bytes) -> bytes:
    """Decrypt, verify the tag in fixed duration, then unpad.

    AuthFailure on any tag mismatch (including truncation, which shifts
    the tag block); PaddingError is only reachable with a valid tag.
    """
    if enc_key == mac_key:
        raise ValueError("enc_key and mac_key must be distinct")
    if frame.n_blocks < 3:
        raise AuthFailure("frame too short to carry data, padding and tag")
    plain = cbc_decrypt(frame.ciphertext, enc_key, frame.iv)
    body, tag_block = plain[:-BLOCK_BYTES], plain[-BLOCK_BYTES:]
    got_tag = int.from_bytes(tag_block, "big") >> (64 - frame.tag_bits)
    want_tag = compute_dac(body, mac_key, frame.tag_bits)
    n = (frame.tag_bits + 7) // 8
    if not hmac.compare_digest(got_tag.to_bytes(n, "big"),
                               want_tag.to_bytes(n, "big")):
        raise AuthFailure("authentication tag mismatch")
    return unpad_payload(body)
