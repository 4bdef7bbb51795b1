"""End-to-end key pipeline: mask a raw dump, extract, hash, split.

A raw power-up dump filtered through an enrollment mask gives a 128-bit
response. Key generation commits helper data against it; key reproduction
uses that helper data to cancel up to one flipped bit out of a later dump.
Either way the recovered response is hashed with SHA-256 into 256 key bits,
handed out as two 128-bit halves. Keys are a pure function of the response;
helper data never enters the hash.

The hash input is the response packed big-endian (bit 0 into the MSB of byte
0). That choice is arbitrary but pinned by test vectors so independent
implementations interoperate.
"""

from __future__ import annotations

from dataclasses import dataclass

import hashlib

from .bitvec import BitVector
from .enroll import Mask, mask_fingerprint
from .fuzzy import HelperData, generate, reproduce

KEY_BITS = 256
HASH_NAME = "sha256"


@dataclass(frozen=True)
class KeyMaterial:
    """A 256-bit derived key, split into two 128-bit halves."""

    digest: bytes
    device_id: str = ""
    hash_name: str = HASH_NAME

    def __post_init__(self):
        if len(self.digest) != KEY_BITS // 8:
            raise ValueError(f"digest must be {KEY_BITS // 8} bytes")

    @property
    def key_bits(self) -> BitVector:
        return BitVector.from_bytes(self.digest)

    @property
    def key1(self) -> bytes:
        return self.digest[:16]

    @property
    def key2(self) -> bytes:
        return self.digest[16:]

    def hex(self) -> str:
        return self.digest.hex()


def apply_mask(raw: BitVector, mask: Mask) -> BitVector:
    """Filter a raw dump down to the masked response, in mask order."""
    needed = mask.required_dump_bits()
    if len(raw) < needed:
        raise ValueError(
            f"dump has {len(raw)} bits but the mask needs bits "
            f"{mask.base_offset}..{needed - 1}"
        )
    return raw.take(mask.base_offset + mask.positions)


def derive_key(response: BitVector, device_id: str = "") -> KeyMaterial:
    """Hash a recovered 128-bit response into key material."""
    if len(response) != 128:
        raise ValueError(f"response must be 128 bits, got {len(response)}")
    digest = hashlib.sha256(response.to_bytes()).digest()
    return KeyMaterial(digest=digest, device_id=device_id)


def generate_key(raw: BitVector, mask: Mask, seed: int) -> tuple[HelperData, KeyMaterial]:
    """Enroll a dump: returns public helper data and the derived keys."""
    response = apply_mask(raw, mask)
    helper = generate(response, seed, device_id=mask.device_id,
                      mask_sha256=mask_fingerprint(mask))
    return helper, derive_key(response, device_id=mask.device_id)


def reproduce_key(raw: BitVector, mask: Mask, helper: HelperData) -> KeyMaterial:
    """Re-derive the enrolled keys from a fresh dump of the same device.

    The helper must have been generated for this exact mask. Propagates
    :class:`~srampuf.fuzzy.ReproduceFailure` when the dump is too noisy.
    """
    if helper.mask_sha256 and helper.mask_sha256 != mask_fingerprint(mask):
        raise ValueError("helper data was generated for a different mask")
    response = apply_mask(raw, mask)
    recovered = reproduce(response, helper)
    return derive_key(recovered, device_id=mask.device_id)
