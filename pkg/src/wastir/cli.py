"""Command-line surface: embed, extract, verify, metrics, bench.

Exit codes: 0 success, 1 I/O or malformed input, 2 capacity exceeded,
3 missing/invalid payload frame (usually a wrong key), 4 tampering
detected. Usage errors follow the argparse convention (exit 2 with a
usage message on stderr).
"""

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .codec import (
    MODE_FRAMED,
    MODE_RAW,
    CapacityError,
    KIND_IMAGE,
    PayloadError,
    PayloadFrame,
    capacity_bytes,
    derive_keystream,
    embed,
    extract_frame,
)
from .haar import AuthenticationError, recover_cover, resize_cover
from .metrics import compute_report, mse, psnr
from .pixmap import (
    ColorImage,
    GrayImage,
    PixmapError,
    read_auto,
    read_pixmap,
    read_stego,
    write_pixmap,
    write_stego,
)

_NETPBM_MAGICS = (b"P2", b"P3", b"P5", b"P6")
_COVER_SUFFIXES = (".pgm", ".ppm", ".pnm")


def _planes_of(img) -> np.ndarray:
    if isinstance(img, GrayImage):
        return np.stack([img.pixels.astype(np.int64)])
    if isinstance(img, ColorImage):
        return np.stack([p.pixels.astype(np.int64) for p in img.planes])
    return np.stack(list(img.planes))  # TranslatedImage / StegoContainer


def _fmt(value) -> str:
    if isinstance(value, float):
        return "INF" if math.isinf(value) else "%.7f" % value
    return str(value)


def _jsonable(value):
    if isinstance(value, float) and math.isinf(value):
        return "INF"
    return value


def _emit_record(record: dict, fmt: str, stream) -> None:
    if fmt == "json":
        json.dump({k: _jsonable(v) for k, v in record.items()}, stream, indent=2)
        stream.write("\n")
    elif fmt == "csv":
        stream.write(",".join(record.keys()) + "\n")
        stream.write(",".join(_fmt(v) for v in record.values()) + "\n")
    else:
        for key, value in record.items():
            stream.write("%s %s\n" % (key, _fmt(value)))


def _emit_table(rows: list, fmt: str, stream) -> None:
    columns = list(rows[0].keys())
    if fmt == "json":
        payload = {
            "rows": [{k: _jsonable(v) for k, v in r.items()} for r in rows[:-1]],
            "average": {k: _jsonable(v) for k, v in rows[-1].items()},
        }
        json.dump(payload, stream, indent=2)
        stream.write("\n")
    elif fmt == "csv":
        stream.write(",".join(columns) + "\n")
        for row in rows:
            stream.write(",".join(_fmt(row[c]) for c in columns) + "\n")
    else:
        cells = [columns] + [[_fmt(r[c]) for c in columns] for r in rows]
        widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
        for row in cells:
            stream.write("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")


def _load_secret(data: bytes, mode: str) -> PayloadFrame:
    """A PGM secret embeds as an image payload; anything else as raw bytes."""
    looks_netpbm = len(data) >= 3 and data[:2] in _NETPBM_MAGICS and data[2] in b" \t\n\r\x0b\x0c"
    if not looks_netpbm:
        return PayloadFrame.raw(data) if mode == MODE_RAW else PayloadFrame.from_bytes(data)
    img = read_pixmap(data)
    if isinstance(img, ColorImage):
        raise PixmapError("color secrets are not supported; supply a PGM or raw bytes")
    if mode == MODE_RAW:
        return PayloadFrame.raw(img.pixels.tobytes())
    return PayloadFrame.from_image(img)


def cmd_embed(args) -> int:
    cover = read_pixmap(Path(args.cover).read_bytes())
    channels = 3 if isinstance(cover, ColorImage) else 1
    frame = _load_secret(Path(args.secret).read_bytes(), args.mode)
    capacity = capacity_bytes(cover.width, cover.height, channels, args.mode)
    if len(frame.data) > capacity:
        print(
            "error: payload needs %d bytes but capacity is %d bytes"
            % (len(frame.data), capacity),
            file=sys.stderr,
        )
        return 2
    ks = derive_keystream(args.key)
    translated = resize_cover(cover, args.beta)
    stego = embed(translated, frame, ks)
    Path(args.out).write_bytes(write_stego(stego.to_container()))
    if not args.quiet:
        report = compute_report(_planes_of(translated), _planes_of(stego))
        _emit_record(
            {
                "payload_bytes": len(frame.data),
                "capacity_bytes": capacity,
                "mse": report.mse,
                "psnr": report.psnr,
                "fidelity": report.fidelity,
            },
            args.emit,
            sys.stdout,
        )
    return 0


def cmd_extract(args) -> int:
    container = read_stego(Path(args.stego).read_bytes())
    ks = derive_keystream(args.key)
    frame = extract_frame(container, ks, args.mode, args.raw_digit_count)
    if frame.mode == MODE_FRAMED and frame.kind == KIND_IMAGE:
        pixels = np.frombuffer(frame.data, dtype=np.uint8).reshape(frame.height, frame.width)
        out_bytes = write_pixmap(GrayImage(pixels))
    else:
        out_bytes = frame.data
    Path(args.out).write_bytes(out_bytes)
    if not args.quiet:
        _emit_record(
            {
                "payload_bytes": len(frame.data),
                "kind": "image" if frame.mode == MODE_FRAMED and frame.kind == KIND_IMAGE
                else "bytes",
            },
            args.emit,
            sys.stdout,
        )
    return 0


def cmd_verify(args) -> int:
    container = read_stego(Path(args.stego).read_bytes())
    recovered = recover_cover(container)
    if args.out:
        Path(args.out).write_bytes(write_pixmap(recovered))
    if args.cover:
        reference = read_pixmap(Path(args.cover).read_bytes())
        ref_planes = _planes_of(reference)
        rec_planes = _planes_of(recovered)
        if ref_planes.shape != rec_planes.shape:
            print("error: recovered cover differs from reference (shape mismatch)",
                  file=sys.stderr)
            return 4
        m = mse(ref_planes, rec_planes)
        _emit_record({"mse": m, "psnr": psnr(m)}, args.emit, sys.stdout)
        if m != 0:
            print("error: recovered cover differs from reference", file=sys.stderr)
            return 4
    elif not args.quiet:
        _emit_record(
            {
                "status": "authentic",
                "width": recovered.width,
                "height": recovered.height,
                "channels": 3 if isinstance(recovered, ColorImage) else 1,
            },
            args.emit,
            sys.stdout,
        )
    return 0


def cmd_metrics(args) -> int:
    ref = read_auto(Path(args.ref).read_bytes())
    dist = read_auto(Path(args.dist).read_bytes())
    report = compute_report(_planes_of(ref), _planes_of(dist))
    _emit_record(
        {"mse": report.mse, "psnr": report.psnr, "fidelity": report.fidelity},
        args.emit,
        sys.stdout,
    )
    return 0


def cmd_bench(args) -> int:
    directory = Path(args.covers)
    files = sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in _COVER_SUFFIXES
    )
    if not files:
        raise ValueError("no cover images (%s) in %s" % ("/".join(_COVER_SUFFIXES), directory))
    secret = Path(args.secret).read_bytes() if args.secret else None
    ks = derive_keystream(args.key)
    rows = []
    for index, path in enumerate(files):
        cover = read_pixmap(path.read_bytes())
        channels = 3 if isinstance(cover, ColorImage) else 1
        capacity = capacity_bytes(cover.width, cover.height, channels, MODE_RAW)
        if secret is not None:
            if len(secret) > capacity:
                raise CapacityError(4 * len(secret), 4 * capacity)
            payload = secret
        else:
            rng = np.random.default_rng((args.seed, index))
            payload = rng.integers(0, 256, capacity, dtype=np.uint8).tobytes()
        start = time.perf_counter()
        translated = resize_cover(cover, args.beta)
        stego = embed(translated, PayloadFrame.raw(payload), ks)
        millis = (time.perf_counter() - start) * 1000.0
        report = compute_report(_planes_of(translated), _planes_of(stego))
        rows.append(
            {
                "name": path.name,
                "mse": report.mse,
                "psnr": report.psnr,
                "fidelity": report.fidelity,
                "capacity_bytes": capacity,
                "millis": millis,
            }
        )
    rows.append(
        {
            "name": "average",
            "mse": sum(r["mse"] for r in rows) / len(rows),
            "psnr": sum(r["psnr"] for r in rows) / len(rows),
            "fidelity": sum(r["fidelity"] for r in rows) / len(rows),
            "capacity_bytes": sum(r["capacity_bytes"] for r in rows) / len(rows),
            "millis": sum(r["millis"] for r in rows) / len(rows),
        }
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            _emit_table(rows, args.emit, fh)
    else:
        _emit_table(rows, args.emit, sys.stdout)
    return 0


def _beta(text: str) -> int:
    value = int(text)
    if not 0 <= value <= 255:
        raise argparse.ArgumentTypeError("beta must be in [0, 255]")
    return value


def _add_common(sub, emit_default="text"):
    sub.add_argument("--key", default="", help="secret key string (default: empty)")
    sub.add_argument("--emit", choices=("text", "csv", "json"), default=emit_default,
                     help="report format (default: %(default)s)")
    sub.add_argument("--quiet", "-q", action="store_true", help="suppress the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wastir",
        description="Hide a payload in a 2x-upscaled image; the receiver gets both "
        "the payload and the original cover back bit-exactly.",
        epilog="exit codes: 0 ok, 1 I/O, 2 capacity, 3 key/format, 4 tamper",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="upscale a cover and embed a secret into it")
    p.add_argument("--cover", required=True, help="cover image (PGM/PPM)")
    p.add_argument("--secret", required=True,
                   help="secret file; a PGM embeds as an image, anything else as bytes")
    p.add_argument("--out", required=True, help="output stego container")
    p.add_argument("--beta", type=_beta, default=0,
                   help="false detail coefficient 0..255 (default: %(default)s)")
    p.add_argument("--mode", choices=(MODE_FRAMED, MODE_RAW), default=MODE_FRAMED,
                   help="framed adds a self-describing 16-byte header (default)")
    _add_common(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="extract the payload from a stego container")
    p.add_argument("--stego", required=True, help="stego container file")
    p.add_argument("--out", required=True, help="output payload file")
    p.add_argument("--mode", choices=(MODE_FRAMED, MODE_RAW), default=MODE_FRAMED)
    p.add_argument("--raw-digit-count", type=int, default=None,
                   help="digit count to read in raw mode (multiple of 4)")
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("verify", help="recover the cover and authenticate the stego")
    p.add_argument("--stego", required=True, help="stego container file")
    p.add_argument("--cover", default=None, help="reference cover to compare against")
    p.add_argument("--out", default=None, help="write the recovered cover here")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("metrics", help="MSE/PSNR/fidelity between two images")
    p.add_argument("ref", help="reference image (pixmap or stego container)")
    p.add_argument("dist", help="distorted image of the same shape")
    _add_common(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("bench", help="embed at full capacity over a cover directory")
    p.add_argument("--covers", required=True, help="directory of PGM/PPM covers")
    p.add_argument("--beta", type=_beta, default=0)
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the generated uniform payload (default: %(default)s)")
    p.add_argument("--secret", default=None,
                   help="optional payload file used for every cover instead")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "extract" and args.mode == MODE_RAW and args.raw_digit_count is None:
        parser.error("--raw-digit-count is required with --mode raw")
    try:
        return args.func(args)
    except CapacityError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except PayloadError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3
    except AuthenticationError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 4
    except (PixmapError, OSError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
