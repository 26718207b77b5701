"""Command-line pipeline driver.

Subcommands mirror the pipeline stages: catalog-filter, segment,
normalize, augment, batch, sched, stats, wer (plus make-demo for a
self-contained walkthrough corpus). Every artifact starts with a
reproducibility header (tool version, seed, hash of the effective
parameters) and contains no wall-clock data, so identical invocations
produce byte-identical outputs.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__, audio, catalog, schedule, segment, textnorm
from .augment import AugmentSpec, BatchItem, augment_batch, read_pool_file
from .batch import assemble, plan_rows, plan_stats, utterance_tokens
from .config import load_config, params_hash, worker_count
from .errors import DataError, ManifestError, SpraakprepError, UsageError
from .manifest import iter_manifest, make_header, write_manifest


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); usage errors are 1
        raise UsageError(message)


def _split_csv(value):
    return [v.strip() for v in value.split(",") if v.strip()]


def _cfg_get(cfg, *keys, default=None):
    node = cfg
    for key in keys:
        if not isinstance(node, dict) or key not in node:
            return default
        node = node[key]
    return node


def _need(value, flag):
    if value is None:
        raise UsageError(f"missing required {flag} (flag or config)")
    return value


def _utterance_rows(variant_name, utterances):
    counters = {}
    for u in utterances:
        i = counters.get(u.media_id, 0)
        counters[u.media_id] = i + 1
        yield {
            "utterance_id": f"{u.media_id}-{i:05d}",
            "media_id": u.media_id,
            "start_s": u.start_s,
            "end_s": u.end_s,
            "duration_s": u.end_s - u.start_s,
            "text": u.text,
            "speaker": u.speaker,
            "variant": variant_name,
        }


def cmd_catalog_filter(args, cfg):
    allow = args.allow if args.allow is not None else _cfg_get(cfg, "catalog_filter", "allow_genres", default=[])
    deny = args.deny if args.deny is not None else _cfg_get(cfg, "catalog_filter", "deny_genres", default=[])
    max_s = args.max_duration_s
    if max_s is None:
        max_s = _cfg_get(cfg, "catalog_filter", "max_duration_s", default=catalog.MAX_BROADCAST_S)
    catalog_path = _need(args.catalog or _cfg_get(cfg, "paths", "catalog"), "--catalog")

    records = sorted(catalog.read_catalog(catalog_path), key=lambda r: r.sort_key)
    before = catalog.compute_stats(records)
    kept = catalog.filter_genre(records, allow=allow, deny=deny)
    kept = catalog.filter_duration(kept, max_s=float(max_s))
    if not args.no_dedup:
        kept = catalog.dedup_consecutive(kept)
    after = catalog.compute_stats(kept)

    params = {
        "subcommand": "catalog-filter",
        "catalog": str(catalog_path),
        "allow": sorted(allow),
        "deny": sorted(deny),
        "max_duration_s": float(max_s),
        "dedup": not args.no_dedup,
    }
    write_manifest(
        args.out,
        (r.to_row() for r in kept),
        header=make_header(params_sha256=params_hash(params)),
    )
    retained = catalog.retained_fraction(before, after) if before.total_hours else 0.0
    print(
        f"catalog-filter: kept {after.utterance_count}/{before.utterance_count} records, "
        f"{after.total_hours:.3f}/{before.total_hours:.3f} h "
        f"(retained fraction {retained:.4f})"
    )
    return 0


def _parse_segments(rows):
    segments = []
    for row in rows:
        try:
            segments.append(
                segment.TranscriptSegment(
                    media_id=str(row["media_id"]),
                    start_s=float(row["start_s"]),
                    end_s=float(row["end_s"]),
                    text=str(row.get("text", "")),
                    speaker=row.get("speaker"),
                    stage=row.get("stage", segment.STAGE_ASR),
                )
            )
        except (KeyError, ValueError) as exc:
            raise ManifestError(f"bad stage-manifest row {row!r}: {exc}") from exc
    return segments


def cmd_segment(args, cfg):
    variant_name = _need(args.variant or _cfg_get(cfg, "variant"), "--variant")
    if variant_name not in segment.VARIANTS:
        raise UsageError(f"unknown variant {variant_name!r}")
    keywords = args.keywords if args.keywords is not None else _cfg_get(cfg, "keywords")
    keywords = frozenset(keywords) if keywords is not None else segment.DEFAULT_KEYWORDS

    allowed_media = None
    if args.catalog:
        allowed_media = set()
        for row in iter_manifest(args.catalog):
            media_path = row.get("media_path")
            if media_path:
                allowed_media.add(Path(media_path).stem)

    utterances = []
    if variant_name == "sequential":
        media_dir = _need(args.media_dir or _cfg_get(cfg, "paths", "media_dir"), "--media-dir")
        for wav in sorted(Path(media_dir).glob("*.wav")):
            media_id = wav.stem
            if allowed_media is not None and media_id not in allowed_media:
                continue
            _, duration = audio.probe_wav(wav)
            utterances.extend(
                segment.run_variant(
                    variant_name, [], media_duration_s=duration, media_id=media_id
                )
            )
    else:
        manifest_path = _need(
            args.manifest or _cfg_get(cfg, "paths", "stage_manifest"), "--manifest"
        )
        segments = _parse_segments(iter_manifest(manifest_path))
        if allowed_media is not None:
            segments = [s for s in segments if s.media_id in allowed_media]
        utterances = segment.run_variant(variant_name, segments, keywords=keywords)

    params = {
        "subcommand": "segment",
        "variant": variant_name,
        "keywords": sorted(keywords),
        "manifest": str(args.manifest or ""),
        "catalog": str(args.catalog or ""),
    }
    count = write_manifest(
        args.out,
        _utterance_rows(variant_name, utterances),
        header=make_header(params_sha256=params_hash(params)),
    )
    print(f"segment: {count} utterances via {variant_name} -> {args.out}")
    return 0


def cmd_normalize(args, cfg):
    unmapped_total = 0
    if args.format == "text":
        try:
            lines = Path(args.infile).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise DataError(f"cannot read {args.infile}: {exc}") from exc
        out_lines = []
        for line in lines:
            normalized, stats = textnorm.normalize_with_stats(line)
            unmapped_total += sum(stats.unmapped.values())
            out_lines.append(normalized)
        Path(args.out).write_text("\n".join(out_lines) + "\n", encoding="utf-8")
        count = len(out_lines)
    else:
        rows = []
        for row in iter_manifest(args.infile):
            normalized, stats = textnorm.normalize_with_stats(str(row.get(args.field, "")))
            unmapped_total += sum(stats.unmapped.values())
            row = dict(row)
            row[args.field] = normalized
            rows.append(row)
        params = {"subcommand": "normalize", "infile": str(args.infile), "field": args.field}
        count = write_manifest(
            args.out, rows, header=make_header(params_sha256=params_hash(params))
        )
    print(f"normalize: {count} records -> {args.out} ({unmapped_total} unmappable letters)")
    return 0


def cmd_wer(args, cfg):
    try:
        refs = Path(args.ref).read_text(encoding="utf-8").splitlines()
        hyps = Path(args.hyp).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read input: {exc}") from exc
    if len(refs) != len(hyps):
        raise DataError(f"line count mismatch: {len(refs)} references vs {len(hyps)} hypotheses")
    rows = []
    total = {"substitutions": 0, "deletions": 0, "insertions": 0, "ref_words": 0}
    for i, (ref, hyp) in enumerate(zip(refs, hyps)):
        breakdown = textnorm.wer(ref, hyp)
        row = {"index": i, **breakdown.to_dict()}
        rows.append(row)
        for key in total:
            total[key] += row[key]
    errors = total["substitutions"] + total["deletions"] + total["insertions"]
    aggregate = {"kind": "aggregate", **total, "wer": errors / total["ref_words"]}
    rows.append(aggregate)
    params = {"subcommand": "wer", "ref": str(args.ref), "hyp": str(args.hyp)}
    write_manifest(args.out, rows, header=make_header(params_sha256=params_hash(params)))
    print(f"wer: {aggregate['wer']:.4f} over {total['ref_words']} reference words -> {args.out}")
    return 0


class _MediaCache:
    """Keeps the most recently used media clips in memory."""

    def __init__(self, media_dir, capacity: int = 4):
        self.media_dir = Path(media_dir)
        self.capacity = capacity
        self._clips: dict[str, audio.AudioClip] = {}

    def get(self, media_id: str) -> audio.AudioClip:
        clip = self._clips.get(media_id)
        if clip is None:
            clip = audio.read_pcm(self.media_dir / f"{media_id}.wav")
            if len(self._clips) >= self.capacity:
                self._clips.pop(next(iter(self._clips)))
            self._clips[media_id] = clip
        return clip


def _chunked(seq, size):
    if size <= 0:
        return [seq] if seq else []
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def cmd_augment(args, cfg):
    in_path = _need(args.infile, "--in")
    media_dir = _need(args.media_dir or _cfg_get(cfg, "paths", "media_dir"), "--media-dir")
    pools_path = _need(args.pools or _cfg_get(cfg, "paths", "pools"), "--pools")
    mode = _need(args.mode or _cfg_get(cfg, "augment", "mode"), "--mode")
    fraction = args.fraction
    if fraction is None:
        fraction = _cfg_get(cfg, "augment", "fraction", default=0.10)
    snr_range = _cfg_get(cfg, "augment", "snr_range", default=[0.0, 15.0])
    snr_lo = args.snr_lo if args.snr_lo is not None else float(snr_range[0])
    snr_hi = args.snr_hi if args.snr_hi is not None else float(snr_range[1])
    seed = args.seed if args.seed is not None else _cfg_get(cfg, "seed")
    seed = _need(seed, "--seed")

    spec = AugmentSpec(mode=mode, fraction=float(fraction), snr_range=(snr_lo, snr_hi), seed=seed)
    pools = read_pool_file(pools_path)
    rows = list(iter_manifest(in_path))
    cache = _MediaCache(media_dir)

    def to_item(row):
        try:
            clip = audio.crop(cache.get(str(row["media_id"])), float(row["start_s"]), float(row["end_s"]))
            return BatchItem(
                id=str(row["utterance_id"]),
                clip=clip,
                speaker=row.get("speaker"),
                session=row.get("session") or str(row["media_id"]),
            )
        except KeyError as exc:
            raise ManifestError(f"utterance row {row!r} misses {exc}") from exc

    batches = _chunked(rows, args.batch_size)
    workers = worker_count(args.workers)

    def run_one(batch_index, batch_rows):
        items = [to_item(r) for r in batch_rows]
        return augment_batch(items, spec, pools, batch_index=batch_index)

    if workers > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, range(len(batches)), batches))
    else:
        results = [run_one(i, b) for i, b in enumerate(batches)]

    out_dir = Path(args.out_dir)
    audio_dir = out_dir / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)
    params = {
        "subcommand": "augment",
        "mode": mode,
        "fraction": float(fraction),
        "snr_range": [snr_lo, snr_hi],
        "seed": seed,
        "infile": str(in_path),
        "batch_size": args.batch_size,
    }
    digest = params_hash(params)

    written = []
    out_rows = []
    log_rows = []
    try:
        row_by_id = {str(r["utterance_id"]): r for r in rows}
        for (items, logs) in results:
            log_rows.extend(logs)
            touched_ids = {l["utterance_id"] for l in logs}
            for item in items:
                rel = f"audio/{item.id}.wav"
                audio.write_pcm(out_dir / rel, item.clip, encoding="float32")
                written.append(out_dir / rel)
                src = row_by_id[item.id]
                out_rows.append(
                    {
                        "utterance_id": item.id,
                        "audio_path": rel,
                        "duration_s": item.clip.duration_s,
                        "text": src.get("text", ""),
                        "speaker": item.speaker,
                        "media_id": src.get("media_id"),
                        "start_s": src.get("start_s"),
                        "end_s": src.get("end_s"),
                        "augmented": item.id in touched_ids,
                    }
                )
        write_manifest(
            out_dir / "utterances.jsonl",
            out_rows,
            header=make_header(seed=seed, params_sha256=digest),
        )
        write_manifest(
            out_dir / "provenance.jsonl",
            log_rows,
            header=make_header(seed=seed, params_sha256=digest),
        )
    except BaseException:
        for path in written:
            Path(path).unlink(missing_ok=True)
        raise
    print(
        f"augment: {len(log_rows)}/{len(out_rows)} utterances degraded with {mode} -> {out_dir}"
    )
    return 0


def cmd_batch(args, cfg):
    budget = args.budget if args.budget is not None else _cfg_get(cfg, "batch", "token_budget")
    budget = int(_need(budget, "--budget"))
    sample_rate = args.sample_rate
    if sample_rate is None:
        sample_rate = _cfg_get(cfg, "batch", "sample_rate", default=16000)
    seed = args.seed if args.seed is not None else _cfg_get(cfg, "seed")
    seed = _need(seed, "--seed")

    items = []
    for row in iter_manifest(args.infile):
        items.append(
            (str(row["utterance_id"]), utterance_tokens(float(row["duration_s"]), int(sample_rate)))
        )
    plan = assemble(items, budget, seed)
    stats = plan_stats(plan)
    params = {
        "subcommand": "batch",
        "budget": budget,
        "sample_rate": int(sample_rate),
        "seed": seed,
        "infile": str(args.infile),
    }
    write_manifest(
        args.out,
        plan_rows(plan),
        header=make_header(seed=seed, params_sha256=params_hash(params)),
    )
    print(
        f"batch: {stats.batch_count} batches, mean fill {stats.mean_fill:.4f}, "
        f"final partial: {plan.final_partial}"
    )
    return 0


def cmd_sched(args, cfg):
    kind = args.kind or _cfg_get(cfg, "schedule", "kind")
    kind = _need(kind, "--kind")
    sched_cfg = _cfg_get(cfg, "schedule", default={}) or {}
    kwargs = {}
    if kind == "triangular":
        peak = args.peak if args.peak is not None else sched_cfg.get("peak_lr")
        kwargs["peak_lr"] = float(_need(peak, "--peak"))
        steps_up = args.steps_up if args.steps_up is not None else sched_cfg.get("steps_up")
        steps_down = args.steps_down if args.steps_down is not None else sched_cfg.get("steps_down")
        if steps_up is None or steps_down is None:
            total = args.steps if args.steps is not None else sched_cfg.get("total_steps")
            total = int(_need(total, "--steps"))
            steps_up = steps_up if steps_up is not None else total // 2
            steps_down = steps_down if steps_down is not None else total - steps_up
        kwargs["steps_up"] = int(steps_up)
        kwargs["steps_down"] = int(steps_down)
    elif kind == "two-stage":
        peak = args.peak if args.peak is not None else sched_cfg.get("peak_lr")
        kwargs["peak_lr"] = float(_need(peak, "--peak"))
        total = args.steps if args.steps is not None else sched_cfg.get("total_steps")
        kwargs["total_steps"] = int(_need(total, "--steps"))
        if args.warmup_fraction is not None:
            kwargs["warmup_fraction"] = args.warmup_fraction
    elif kind == "tri-stage":
        total = args.steps if args.steps is not None else sched_cfg.get("total_steps")
        kwargs["total_steps"] = int(_need(total, "--steps"))
        if args.init_lr is not None:
            kwargs["init_lr"] = args.init_lr
        if args.hold_lr is not None:
            kwargs["hold_lr"] = args.hold_lr
        if args.final_lr is not None:
            kwargs["final_lr"] = args.final_lr
        if args.phases is not None:
            kwargs["phase_fractions"] = tuple(float(p) for p in _split_csv(args.phases))
    else:
        raise UsageError(f"unknown schedule kind {kind!r}")

    config = schedule.make_schedule(kind, **kwargs)
    params = {"subcommand": "sched", "kind": kind, **kwargs}
    if "phase_fractions" in params:
        params["phase_fractions"] = list(params["phase_fractions"])
    header_lines = [
        f"tool spraakprep {__version__}",
        f"params_sha256 {params_hash(params)}",
    ]
    rows = schedule.export_table(args.out, config, stride=args.stride, header_lines=header_lines)
    print(
        f"sched: {kind}, lr(0)={config.lr_at(0):.6e}, "
        f"lr({config.total_steps})={config.lr_at(config.total_steps):.6e}, {rows} rows -> {args.out}"
    )
    return 0


def cmd_stats(args, cfg):
    rows = list(iter_manifest(args.infile))
    stats = catalog.compute_stats(rows)
    report = stats.to_dict()
    if args.out:
        import json

        payload = dict(report)
        payload["params_sha256"] = params_hash({"subcommand": "stats", "infile": str(args.infile)})
        tmp = Path(str(args.out) + ".tmp")
        tmp.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        tmp.replace(args.out)
    print(
        f"stats: {stats.utterance_count} utterances, {stats.total_hours:.4f} h total, "
        f"mean {stats.mean_duration_s:.2f} s, min {stats.min_duration_s:.2f} s, "
        f"max {stats.max_duration_s:.2f} s"
    )
    return 0


def cmd_make_demo(args, cfg):
    from .demo import make_demo_corpus

    paths = make_demo_corpus(args.out, seed=args.seed)
    for name, path in paths.items():
        print(f"make-demo: {name}: {path}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="spraakprep", description=__doc__)
    parser.add_argument("--version", action="version", version=f"spraakprep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--config", help="pipeline config JSON supplying defaults")
        return p

    p = add("catalog-filter", cmd_catalog_filter, "genre/duration/duplicate curation")
    p.add_argument("--catalog", help="catalog CSV or JSONL")
    p.add_argument("--out", required=True)
    p.add_argument("--allow", type=_split_csv, help="comma-separated genre allow list")
    p.add_argument("--deny", type=_split_csv, help="comma-separated genre deny list")
    p.add_argument("--max-duration-s", type=float, dest="max_duration_s")
    p.add_argument("--no-dedup", action="store_true")

    p = add("segment", cmd_segment, "apply a segmentation variant to a stage manifest")
    p.add_argument("--manifest", help="stage manifest JSONL")
    p.add_argument("--variant", choices=sorted(segment.VARIANTS))
    p.add_argument("--out", required=True)
    p.add_argument("--catalog", help="restrict to media of a filtered catalog manifest")
    p.add_argument("--keywords", type=_split_csv, help="hallucination keywords to drop")
    p.add_argument("--media-dir", dest="media_dir", help="media directory (sequential variant)")

    p = add("normalize", cmd_normalize, "fold text onto the 28-symbol alphabet")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("jsonl", "text"), default="jsonl")
    p.add_argument("--field", default="text", help="row field to normalize (jsonl format)")

    p = add("wer", cmd_wer, "caseless word error rate of paired line files")
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--out", required=True)

    p = add("augment", cmd_augment, "apply a degradation recipe to an utterance corpus")
    p.add_argument("--in", dest="infile", required=True, help="utterance manifest")
    p.add_argument("--media-dir", dest="media_dir")
    p.add_argument("--pools", help="pool definition JSONL")
    p.add_argument("--mode")
    p.add_argument("--fraction", type=float)
    p.add_argument("--snr-lo", dest="snr_lo", type=float)
    p.add_argument("--snr-hi", dest="snr_hi", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=0,
                   help="utterances per batch; 0 = whole corpus in one batch")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out-dir", dest="out_dir", required=True)

    p = add("batch", cmd_batch, "pack utterances into token-budget batches")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--sample-rate", dest="sample_rate", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)

    p = add("sched", cmd_sched, "export a learning-rate schedule table")
    p.add_argument("--kind", choices=schedule.KINDS)
    p.add_argument("--peak", type=float, help="peak learning rate")
    p.add_argument("--steps", type=int, help="total steps")
    p.add_argument("--steps-up", dest="steps_up", type=int)
    p.add_argument("--steps-down", dest="steps_down", type=int)
    p.add_argument("--warmup-fraction", dest="warmup_fraction", type=float)
    p.add_argument("--init-lr", dest="init_lr", type=float)
    p.add_argument("--hold-lr", dest="hold_lr", type=float)
    p.add_argument("--final-lr", dest="final_lr", type=float)
    p.add_argument("--phases", help="tri-stage phase fractions, e.g. 0.1,0.4,0.5")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--out", required=True)

    p = add("stats", cmd_stats, "aggregate durations of a manifest")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", help="also write the report as JSON")

    p = add("make-demo", cmd_make_demo, "generate the synthetic demo corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=1234)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_config(args.config) if getattr(args, "config", None) else {}
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SpraakprepError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
