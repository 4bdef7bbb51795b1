"""Command-line front end tying simulation, enrollment, and key handling together.

Exit codes: 0 success; 2 usage or input error (bad arguments, malformed or
mismatched files, unknown device); 3 key reproduction failure (re-sample the
device); 4 reproduced key does not match the stored debug key hash; 5 not
enough stable bits to fill a mask at the requested threshold.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import re
import secrets
import sys

import numpy as np

from . import analytics, enroll, fuzzy, keygen, registry as reg, simulate
from ._kv import TextFormatError
from .bitvec import BitVector, load_dump, save_dump

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_REPRODUCE_FAILURE = 3
EXIT_KEY_MISMATCH = 4
EXIT_INSUFFICIENT_BITS = 5

_DEVICE_ID_RE = re.compile(r"^[A-Za-z0-9._-]+$")


def _fail(message: str) -> None:
    raise CliUsageError(message)


class CliUsageError(Exception):
    pass


def _load_calibration(args) -> simulate.Calibration:
    cal = simulate.load_calibration(args.config) if args.config else simulate.Calibration()
    overrides = {}
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            _fail(f"--set expects key=value, got {item!r}")
        overrides[key.strip()] = value.strip()
    if overrides:
        merged = {k: str(getattr(cal, k)) for k in (
            "unstable_fraction", "cluster_radius", "cluster_mix", "flip_prob_unstable",
            "flip_prob_edge", "flip_decay", "htna_multiplier", "ntwa_multiplier")}
        for key, value in overrides.items():
            if key not in merged:
                _fail(f"unknown calibration key {key!r}")
            merged[key] = value
        cal = simulate.parse_calibration("".join(f"{k} = {v}\n" for k, v in merged.items()))
    return cal


def _dump_paths(directory: str) -> list[str]:
    if not os.path.isdir(directory):
        _fail(f"not a directory: {directory}")
    names = sorted(n for n in os.listdir(directory) if n.endswith(".hex"))
    return [os.path.join(directory, n) for n in names]


def _load_dumps(directory: str, minimum: int = 1) -> list[BitVector]:
    paths = _dump_paths(directory)
    if len(paths) < minimum:
        _fail(f"{directory} holds {len(paths)} dump(s); need at least {minimum}")
    return [load_dump(p) for p in paths]


def _write_csv(text: str, out: str | None) -> None:
    if out:
        from ._kv import atomic_write_text
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    cal = _load_calibration(args)
    condition = cal.condition(args.condition)
    device = simulate.new_device(args.device_seed, num_bits=args.num_bits, calibration=cal)
    os.makedirs(args.out_dir, exist_ok=True)
    for k in range(args.count):
        sample = simulate.power_up_sample(device, condition, args.seed0 + k)
        save_dump(os.path.join(args.out_dir, f"sample-{args.seed0 + k:05d}.hex"), sample)
    print(f"wrote {args.count} {args.condition} dump(s) of {args.num_bits} bits to {args.out_dir}")
    return EXIT_OK


def cmd_enroll(args) -> int:
    if not _DEVICE_ID_RE.match(args.device_id):
        _fail(f"device id {args.device_id!r} must match {_DEVICE_ID_RE.pattern}")
    samples = _load_dumps(args.dumps, minimum=2)
    registry_dir = os.path.dirname(os.path.abspath(args.registry))
    os.makedirs(registry_dir, exist_ok=True)
    if os.path.exists(args.registry):
        registry = reg.load_registry(args.registry)
    else:
        registry = reg.Registry()
    if args.device_id in registry.entries:
        _fail(f"device {args.device_id!r} is already enrolled")

    mask = enroll.build_mask(
        samples,
        threshold=args.threshold,
        target_len=args.target_len,
        window_length=args.window_length,
        base_offset=args.base_offset,
        device_id=args.device_id,
    )
    mask_name = f"{args.device_id}.mask"
    mask_path = os.path.join(registry_dir, mask_name)
    enroll.save_mask(mask_path, mask)
    registry.add(reg.RegistryEntry(
        device_id=args.device_id,
        mask_file=mask_name,
        mask_sha256=reg.file_sha256(mask_path),
        threshold=args.threshold,
        sample_count=len(samples),
        base_offset=args.base_offset,
        window_length=args.window_length,
        num_windows=mask.num_windows,
        created=reg.utc_timestamp(),
    ))
    reg.save_registry(args.registry, registry)
    print(f"enrolled {args.device_id}: {mask.target_len} positions from "
          f"{mask.num_windows} window(s) at threshold {args.threshold}")
    return EXIT_OK


def _load_enrolled_mask(registry_path: str, device_id: str):
    registry = reg.load_registry(registry_path)
    entry = registry.get(device_id)
    registry_dir = os.path.dirname(os.path.abspath(registry_path))
    mask = enroll.load_mask(os.path.join(registry_dir, entry.mask_file))
    return registry, entry, mask, registry_dir


def _print_key(key: keygen.KeyMaterial) -> None:
    print(f"key1 = {key.key1.hex().upper()}")
    print(f"key2 = {key.key2.hex().upper()}")


def cmd_genkey(args) -> int:
    registry, entry, mask, registry_dir = _load_enrolled_mask(args.registry, args.device_id)
    raw = load_dump(args.dump)
    seed = args.seed if args.seed is not None else secrets.randbits(63)
    helper, key = keygen.generate_key(raw, mask, seed)
    helper_name = f"{args.device_id}.helper"
    helper_path = os.path.join(registry_dir, helper_name)
    fuzzy.save_helper(helper_path, helper)
    key_sha = hashlib.sha256(key.digest).hexdigest() if args.debug else ""
    registry.update(reg.with_helper(entry, helper_name, reg.file_sha256(helper_path),
                                    key_sha256=key_sha))
    reg.save_registry(args.registry, registry)
    print(f"helper data written to {helper_path}")
    if args.debug:
        _print_key(key)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    _, entry, mask, registry_dir = _load_enrolled_mask(args.registry, args.device_id)
    if not entry.helper_file:
        _fail(f"device {args.device_id!r} has no helper data yet; run genkey first")
    helper = fuzzy.load_helper(os.path.join(registry_dir, entry.helper_file))
    raw = load_dump(args.dump)
    key = keygen.reproduce_key(raw, mask, helper)
    print(f"key reproduced for {args.device_id}")
    if args.debug:
        _print_key(key)
        if entry.key_sha256:
            actual = hashlib.sha256(key.digest).hexdigest()
            if actual != entry.key_sha256:
                print("reproduced key does not match the stored key hash", file=sys.stderr)
                return EXIT_KEY_MISMATCH
            print("key hash matches the enrolled key")
    return EXIT_OK


def cmd_stats(args) -> int:
    samples = _load_dumps(args.dumps, minimum=2)
    reports = analytics.block_stability(samples, block_size=args.block_size)
    skipped = analytics.skipped_trailing_bits(min(len(s) for s in samples), args.block_size)
    _write_csv(analytics.block_reports_to_csv(reports), args.out)
    if skipped:
        print(f"note: {skipped} trailing bits did not fill a block and were skipped",
              file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    enroll_samples = _load_dumps(args.enroll_dumps, minimum=2)
    test_samples = {}
    for item in args.test_dumps:
        condition, sep, directory = item.partition("=")
        if not sep:
            _fail(f"--test-dumps expects CONDITION=DIR, got {item!r}")
        test_samples[condition] = _load_dumps(directory, minimum=1)
    thresholds = tuple(int(t) for t in args.thresholds.split(","))
    report = analytics.threshold_sweep(enroll_samples, test_samples,
                                       thresholds=thresholds, block_size=args.block_size)
    _write_csv(analytics.sweep_to_csv(report), args.out)
    return EXIT_OK


def cmd_flip(args) -> int:
    raw = load_dump(args.dump)
    if args.positions:
        positions = [int(p) for p in args.positions.split(",")]
    elif args.count is not None:
        if args.seed is None:
            _fail("--count needs --seed for a reproducible choice")
        rng = np.random.default_rng(args.seed)
        if args.mask:
            mask = enroll.load_mask(args.mask)
            pool = mask.base_offset + mask.positions
            chosen = rng.choice(pool.size, size=args.count, replace=False)
            positions = [int(pool[i]) for i in chosen]
        else:
            positions = [int(p) for p in rng.choice(len(raw), size=args.count, replace=False)]
    else:
        _fail("give --positions or --count")
    bad = [p for p in positions if not 0 <= p < len(raw)]
    if bad:
        _fail(f"positions out of range for a {len(raw)}-bit dump: {bad}")
    save_dump(args.out, raw.with_flips(positions))
    print(f"flipped {len(positions)} bit(s): {','.join(str(p) for p in sorted(positions))}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srampuf",
        description="SRAM power-up PUF toolkit: simulate devices, enroll stable-bit "
                    "masks, and generate/reproduce keys via a Hamming code-offset "
                    "fuzzy extractor.",
        epilog="exit codes: 0 ok, 2 usage/input error, 3 reproduce failure, "
               "4 debug key-hash mismatch, 5 insufficient stable bits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write power-up dumps for a simulated device")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--device-seed", type=int, required=True)
    p.add_argument("--condition", choices=["NTNA", "HTNA", "NTWA"], default="NTNA")
    p.add_argument("-n", "--count", type=int, default=300)
    p.add_argument("--num-bits", type=int, default=simulate.DEFAULT_NUM_BITS)
    p.add_argument("--seed0", type=int, default=0, help="seed of the first sample")
    p.add_argument("--config", help="calibration file (key = value lines)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one calibration value (repeatable)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("enroll", help="build a stable-bit mask from dumps and register it")
    p.add_argument("--dumps", required=True, help="directory of enrollment dumps (*.hex)")
    p.add_argument("--registry", required=True)
    p.add_argument("--device-id", required=True)
    p.add_argument("--threshold", type=int, default=4)
    p.add_argument("--target-len", type=int, default=enroll.DEFAULT_TARGET_LEN)
    p.add_argument("--window-length", type=int, default=enroll.DEFAULT_WINDOW_LENGTH)
    p.add_argument("--base-offset", type=int, default=0)
    p.set_defaults(func=cmd_enroll)

    p = sub.add_parser("genkey", help="generate helper data (and keys) from a dump")
    p.add_argument("--dump", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--device-id", required=True)
    p.add_argument("--seed", type=int, help="codeword seed; random when omitted")
    p.add_argument("--debug", action="store_true",
                   help="print the keys and store a key hash for verification")
    p.set_defaults(func=cmd_genkey)

    p = sub.add_parser("reproduce", help="reproduce the enrolled key from a fresh dump")
    p.add_argument("--dump", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--device-id", required=True)
    p.add_argument("--debug", action="store_true", help="print the keys")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("stats", help="per-block stability statistics as CSV")
    p.add_argument("--dumps", required=True)
    p.add_argument("--block-size", type=int, default=enroll.DEFAULT_WINDOW_LENGTH)
    p.add_argument("--out", help="CSV path (stdout when omitted)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sweep", help="threshold sweep with per-condition flip tallies as CSV")
    p.add_argument("--enroll-dumps", required=True)
    p.add_argument("--test-dumps", action="append", required=True, metavar="CONDITION=DIR")
    p.add_argument("--thresholds", default="1,2,3,4,5")
    p.add_argument("--block-size", type=int, default=enroll.DEFAULT_WINDOW_LENGTH)
    p.add_argument("--out", help="CSV path (stdout when omitted)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("flip", help="copy a dump with chosen bits inverted (test tool)")
    p.add_argument("--dump", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--positions", help="comma-separated global bit indices")
    p.add_argument("--count", type=int, help="flip this many randomly chosen bits")
    p.add_argument("--seed", type=int, help="RNG seed for --count")
    p.add_argument("--mask", help="restrict --count choices to this mask's positions")
    p.set_defaults(func=cmd_flip)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except fuzzy.ReproduceFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REPRODUCE_FAILURE
    except enroll.InsufficientStableBitsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT_BITS
    except (CliUsageError, reg.RegistryError, TextFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
