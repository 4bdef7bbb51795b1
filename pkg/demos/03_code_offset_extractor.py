"""The Hamming code-offset fuzzy extractor.
===========================================

A masked response is stable to within one bit, but "within one bit" is not
good enough for a hash input. The fix: XOR the response against a random
codeword of a single-error-correcting code and publish only that offset.
Anyone holding the offset and a fresh response can cancel a one-bit error;
the offset alone reveals at most the code's 8 redundancy bits.
"""

import numpy as np

from srampuf import BitVector, HammingCode, ReproduceFailure, generate, reproduce
from srampuf.fuzzy import UncorrectableError

rng = np.random.default_rng(2026)
code = HammingCode()
print(f"code: n={code.n}, k={code.k}, r={code.r} (shortened binary Hamming)")

# Encoding appends 8 parity bits; any codeword has syndrome 0.
message = BitVector(rng.integers(0, 2, code.k, dtype=np.uint8))
codeword = code.encode(message)
print(f"codeword weight {codeword.count()}, syndrome {code.syndrome(codeword)}")

# One flipped bit produces that bit's own column code as the syndrome.
flipped = codeword.with_flips([57])
print(f"flip bit 57 -> syndrome {code.syndrome(flipped)} "
      f"(column code of position 57 is {code.column_codes[57]})")
print(f"corrected back? {code.correct(flipped) == codeword}")

# Two flips either hit an impossible syndrome (detected) or miscorrect to a
# DIFFERENT codeword; a distance-3 code cannot tell those apart.
double = codeword.with_flips([119, 127])
try:
    code.correct(double)
except UncorrectableError as exc:
    print(f"flip bits 119+127 -> syndrome {exc.syndrome}: detected as uncorrectable")
miscorrected = code.correct(codeword.with_flips([0, 1]))
print(f"flip bits 0+1 -> silently miscorrected to a different codeword: "
      f"{miscorrected != codeword}")

# The extractor. Enrollment: commit a random codeword against the response.
response = BitVector(rng.integers(0, 2, 128, dtype=np.uint8))
helper = generate(response, seed=int(rng.integers(2**63)))
print(f"\nhelper data (public, {len(helper.code_offset)} bits): "
      f"{helper.code_offset.to_bytes().hex().upper()}")

# Reproduction: a fresh reading differing in at most one bit recovers the
# enrolled response exactly, for every possible flip position.
recovered = sum(reproduce(response.with_flips([j]), helper) == response for j in range(128))
print(f"single-bit flips recovered exactly: {recovered}/128")

# Beyond one flip the extractor refuses (or the key check downstream fails).
survived = 0
for _ in range(500):
    j, k = rng.choice(128, size=2, replace=False)
    try:
        if reproduce(response.with_flips([int(j), int(k)]), helper) == response:
            survived += 1
    except ReproduceFailure:
        pass
print(f"double-bit flips that sneaked through: {survived}/500")
