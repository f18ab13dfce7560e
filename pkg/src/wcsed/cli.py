"""Batch front end.

    wcsed --mode detect --input recordings/ --out-dir out/ [--trace]
    wcsed --mode eval --labels labels.csv --out-dir report/
    wcsed --mode synth --out-dir corpus/ --count 20 --seed 0

Settings come from a flat ``key = value`` config file (``--config`` or the
``WCSED_CONFIG`` environment variable); command-line flags override it.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from .detect import DetectorConfig, analyze, extract_segment
from .evaluation import aggregate_report, read_labels, write_labels
from .signal_io import load_wav, save_wav
from .synth import load_corpus_spec, random_corpus, save_corpus_spec, synthesize_test_signal

log = logging.getLogger("wcsed")

def _floats(text):
    return tuple(float(v) for v in str(text).replace(",", " ").split())


def _band(text):
    v = _floats(text)
    if len(v) != 2:
        raise ValueError(f"a band needs exactly two frequencies, got {text!r}")
    return v


# config-file key -> (DetectorConfig field, parser)
CONFIG_KEYS = {
    "frame_ms": ("frame_length_ms", float),
    "shift_ms": ("frame_shift_ms", float),
    "bins": ("bins", int),
    "gamma": ("gamma", float),
    "gap_frames": ("gap_frames", int),
    "merge_ms": ("merge_ms", float),
    "loudness_th": ("loudness_threshold", float),
    "scales_hf": ("hf_scales", _floats),
    "scales_lf": ("lf_scales", _floats),
    "band_hf": ("hf_band", _band),
    "band_lf": ("lf_band", _band),
    "levels": ("levels", int),
    "variant": ("mode", str),
    "fft_threshold": ("fft_threshold", int),
}
RUN_KEYS = {"workers": int}


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (p.strip() for p in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in CONFIG_KEYS and key not in RUN_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


def build_config(file_values: dict, args) -> tuple:
    fields, run = {}, {"workers": 4}
    merged = dict(file_values)
    for key in list(CONFIG_KEYS) + list(RUN_KEYS):
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    for key, value in merged.items():
        if key in CONFIG_KEYS:
            name, conv = CONFIG_KEYS[key]
            fields[name] = conv(value)
        else:
            run[key] = RUN_KEYS[key](value)
    return DetectorConfig(**fields), run


def _dump_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(obj, indent=2, sort_keys=True))
        fh.write("\n")


def collect_inputs(paths) -> list:
    files = []
    for p in paths:
        if os.path.isdir(p):
            files.extend(sorted(os.path.join(p, f) for f in os.listdir(p)
                                if f.lower().endswith(".wav") and ".extracted." not in f))
        elif os.path.isfile(p):
            files.append(p)
        else:
            raise FileNotFoundError(f"input path does not exist: {p}")
    return files


def detect_file(path, out_dir, config: DetectorConfig, trace: bool = False) -> dict:
    signal = load_wav(path)
    det = analyze(signal, config)
    stem = os.path.splitext(os.path.basename(path))[0]
    save_wav(os.path.join(out_dir, f"{stem}.extracted.wav"), extract_segment(signal, det.endpoints))
    doc = {
        "file": os.path.basename(path),
        "sample_rate": signal.sample_rate,
        "num_samples": len(signal),
        "frame_count": len(det.ce_l),
        "endpoints": det.endpoints.to_dict(),
        "core_region": list(det.core),
        "thresholds": {"core": det.thresholds.core_threshold, "edge": det.thresholds.edge_threshold},
        "loudness_rms": det.loudness,
        "config": config.to_dict(),
    }
    _dump_json(os.path.join(out_dir, f"{stem}.endpoints.json"), doc)
    if trace:
        active = det.active()
        with open(os.path.join(out_dir, f"{stem}.trace.csv"), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["frame", "ce_l", "ce_h", "active"])
            for i, (lo, hi) in enumerate(zip(det.ce_l.values, det.ce_h.values)):
                w.writerow([i, repr(float(lo)), repr(float(hi)), int(active[i])])
    return doc


def _run_pool(fn, jobs, workers):
    # results come back in submission order regardless of completion order
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(fn, *job) for job in jobs]
        out = []
        for job, fut in zip(jobs, futures):
            try:
                out.append((job, fut.result(), None))
            except Exception as exc:  # reported per file, batch continues
                out.append((job, None, exc))
        return out


def run_detect(args, config, run) -> int:
    try:
        files = collect_inputs(args.input or [])
    except FileNotFoundError as exc:
        log.error("%s", exc)
        return 2
    if not files:
        log.error("no input WAV files given")
        return 2
    os.makedirs(args.out_dir, exist_ok=True)
    failures = 0
    for (path, *_), doc, exc in _run_pool(detect_file, [(f, args.out_dir, config, args.trace) for f in files],
                                          run["workers"]):
        if exc is not None:
            failures += 1
            log.error("%s: %s", path, exc)
        else:
            ep = doc["endpoints"]
            print(f"{path}: frames {ep['start_frame']}-{ep['end_frame']} "
                  f"({ep['start_time']:.3f}s - {ep['end_time']:.3f}s)")
    return 1 if failures else 0


def _eval_one(audio, label, config):
    return analyze(load_wav(audio), config).endpoints


def run_eval(args, config, run) -> int:
    if not args.labels:
        log.error("eval mode requires --labels")
        return 2
    try:
        rows = read_labels(args.labels)
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return 2
    missing = [a for a, _ in rows if not os.path.isfile(a)]
    if missing:
        log.error("label rows reference missing audio: %s", ", ".join(missing))
        return 2
    os.makedirs(args.out_dir, exist_ok=True)
    scored, failures = [], 0
    per_item = []
    for (audio, label, _), result, exc in _run_pool(_eval_one, [(a, l, config) for a, l in rows], run["workers"]):
        name = os.path.basename(audio)
        if exc is not None:
            failures += 1
            log.error("%s: %s", audio, exc)
            continue
        scored.append((name, label, result))
        per_item.append((name, label, result))
    if not scored:
        log.error("no labelled file could be processed")
        return 1
    report = aggregate_report(scored)
    doc = report.to_dict()
    for item, (_, label, result) in zip(doc["items"], per_item):
        item.update(true_start=label.start_frame, true_end=label.end_frame,
                    detected_start=result.start_frame, detected_end=result.end_frame)
    doc["failures"] = failures
    doc["config"] = config.to_dict()
    _dump_json(os.path.join(args.out_dir, "eval_report.json"), doc)
    with open(os.path.join(args.out_dir, "eval_table.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["speaker_group", "avg_start_deviation_pct", "avg_end_deviation_pct"])
        for g, s, e in report.table_rows():
            w.writerow([g, f"{s:.3f}", f"{e:.3f}"])
    with open(os.path.join(args.out_dir, "eval_items.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name", "group", "true_start", "true_end", "detected_start", "detected_end",
                    "start_pct", "end_pct"])
        for it in doc["items"]:
            w.writerow([it["name"], it["group"], it["true_start"], it["true_end"], it["detected_start"],
                        it["detected_end"], f"{it['start_pct']:.3f}", f"{it['end_pct']:.3f}"])
    print(f"{'Speaker group':<24}{'start dev %':>12}{'end dev %':>12}")
    for g, s, e in report.table_rows():
        print(f"{g:<24}{s:>12.3f}{e:>12.3f}")
    return 1 if failures else 0


def run_synth(args, config, run) -> int:
    if args.corpus:
        items = load_corpus_spec(args.corpus)
    else:
        items = random_corpus(args.count, seed=args.seed, sample_rate=args.sample_rate)
    os.makedirs(args.out_dir, exist_ok=True)
    labels = []
    for i, item in enumerate(items):
        name = item.name or f"item{i:03d}"
        sig, label = synthesize_test_signal(item, config.frame_shift_ms)
        save_wav(os.path.join(args.out_dir, f"{name}.wav"), sig)
        labels.append((f"{name}.wav", label))
    write_labels(os.path.join(args.out_dir, "labels.csv"), labels)
    save_corpus_spec(os.path.join(args.out_dir, "corpus.json"), items)
    print(f"wrote {len(items)} items to {args.out_dir}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wcsed", description="Wavelet-convolution speech endpoint detection")
    p.add_argument("--mode", choices=["detect", "eval", "synth"], default="detect")
    p.add_argument("--input", nargs="+", help="WAV files or directories (detect)")
    p.add_argument("--out-dir", default=".", help="output directory")
    p.add_argument("--config", default=os.environ.get("WCSED_CONFIG"),
                   help="key = value config file (default: $WCSED_CONFIG)")
    p.add_argument("--labels", help="label CSV: path,start_frame,end_frame,group (eval)")
    p.add_argument("--trace", action="store_true", help="also write <name>.trace.csv")
    p.add_argument("--workers", type=int, help="parallel files (default 4)")
    t = p.add_argument_group("detector")
    t.add_argument("--frame-ms", dest="frame_ms", type=float)
    t.add_argument("--shift-ms", dest="shift_ms", type=float)
    t.add_argument("--bins", type=int)
    t.add_argument("--gamma", type=float)
    t.add_argument("--gap-frames", dest="gap_frames", type=int)
    t.add_argument("--merge-ms", dest="merge_ms", type=float)
    t.add_argument("--loudness-th", dest="loudness_th", type=float)
    t.add_argument("--scales-hf", dest="scales_hf", help="comma-separated scales")
    t.add_argument("--scales-lf", dest="scales_lf", help="comma-separated scales")
    t.add_argument("--band-hf", dest="band_hf", help="low,high Hz")
    t.add_argument("--band-lf", dest="band_lf", help="low,high Hz")
    t.add_argument("--variant", choices=["prose", "pseudocode"])
    s = p.add_argument_group("synth")
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--sample-rate", dest="sample_rate", type=int, default=48000)
    s.add_argument("--corpus", help="corpus spec JSON (overrides --count/--seed)")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = make_parser().parse_args(argv)
    try:
        file_values = read_config_file(args.config) if args.config else {}
        config, run = build_config(file_values, args)
    except (OSError, ValueError) as exc:
        log.error("bad configuration: %s", exc)
        return 2
    handler = {"detect": run_detect, "eval": run_eval, "synth": run_synth}[args.mode]
    return handler(args, config, run)


if __name__ == "__main__":
    sys.exit(main())
