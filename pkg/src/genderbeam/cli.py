"""Command-line front end wiring the pipeline stages together.

Every stage reads and writes plain files, so any built-in piece (the toy
translation models, the diagonal aligner, the rule-based resolver) can be
swapped for real external tools between invocations.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .decode import BeamConfig, NBestList, NoisyChannelToy, TableModel, beam_search, two_pass_decode
from .errors import GenderBeamError
from .evaluation import MetricReport, beam_sweep, evaluate_pipeline
from .formats import (
    parse_alignments,
    parse_nbest,
    read_entities,
    read_pronoun_table,
    read_sentences,
    read_word_list,
    read_testset,
    write_nbest,
)
from .lattice import compose_lattice, serialize_lattice
from .morpho import build_reinflection_pairs, load_lexicon, read_pairs, read_patterns, register_placeholder_patterns, write_pairs
from .rerank import AlignmentMap, NearestPrecedingNounResolver, rerank
from .synth import build_benchmark, write_benchmark


def _pattern_args(args) -> tuple[tuple, frozenset[str]]:
    """Placeholder patterns plus the user gender labels they introduce."""
    if getattr(args, "patterns", None) is None:
        return (), frozenset()
    patterns = read_patterns(args.patterns)
    return patterns, frozenset(str(pattern.gender) for pattern in patterns)


def _load_lexicon(args):
    patterns, labels = _pattern_args(args)
    lexicon = load_lexicon(args.lexicon, user_labels=labels)
    if patterns:
        lexicon = register_placeholder_patterns(lexicon, patterns)
    return lexicon


def _load_pairs(args):
    _, labels = _pattern_args(args)
    return read_pairs(args.pairs, user_labels=labels)


def _load_model(args):
    if args.model_kind == "noisy":
        if args.corpus is None:
            raise ValueError("--corpus is required with --model-kind noisy")
        return NoisyChannelToy.from_files(args.model, args.corpus)
    return TableModel.from_file(args.model)


def _beam_config(args) -> BeamConfig:
    nbest = args.nbest if getattr(args, "nbest", None) is not None else args.beam
    return BeamConfig(args.beam, nbest, args.max_len)


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", required=True, help="model file (score table, or lexical table for noisy)")
    parser.add_argument("--model-kind", choices=("table", "noisy"), default="table")
    parser.add_argument("--corpus", default=None, help="target corpus file, required for --model-kind noisy")


def _add_beam_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--beam", type=int, required=True, help="beam width")
    parser.add_argument("--nbest", type=int, default=None, help="list size (default: beam width)")
    parser.add_argument("--max-len", type=int, default=128, help="hypothesis length cap")


def _add_patterns_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--patterns", default=None, help="placeholder pattern file (introduces user gender labels)")


def _cmd_pairs(args) -> int:
    lexicon = _load_lexicon(args)
    pairs = build_reinflection_pairs(lexicon)
    write_pairs(pairs, args.out)
    print(f"wrote {len(pairs.pairs)} reinflection pairs to {args.out}")
    return 0


def _cmd_lattice(args) -> int:
    pairs = _load_pairs(args)
    lexicon = _load_lexicon(args) if args.lexicon is not None else None
    lattice = compose_lattice(pairs, tuple(args.hyp.split()), lexicon=lexicon)
    Path(args.out).write_text(serialize_lattice(lattice), encoding="utf-8")
    print(f"wrote lattice with {lattice.path_count} paths to {args.out}")
    return 0


def _cmd_decode(args) -> int:
    model = _load_model(args)
    cfg = _beam_config(args)
    lists = {
        sent_id: beam_search(model, source, cfg, source_id=sent_id)
        for sent_id, source in enumerate(read_sentences(args.src))
    }
    write_nbest(lists.values(), args.out)
    print(f"decoded {len(lists)} sentences to {args.out}")
    return 0


def _cmd_two_pass(args) -> int:
    model = _load_model(args)
    pairs = _load_pairs(args)
    lexicon = _load_lexicon(args) if args.lexicon is not None else None
    cfg = _beam_config(args)
    lists = {
        sent_id: two_pass_decode(model, source, pairs, None, cfg, cfg, lexicon=lexicon, source_id=sent_id)
        for sent_id, source in enumerate(read_sentences(args.src))
    }
    write_nbest(lists.values(), args.out)
    print(f"decoded {len(lists)} sentences to {args.out}")
    return 0


def _cmd_rerank(args) -> int:
    lists = parse_nbest(args.nbest)
    alignments = parse_alignments(args.align)
    entities = read_entities(args.entities)
    lexicon = _load_lexicon(args)
    empty = AlignmentMap(())
    selected: dict[int, NBestList] = {}
    for sent_id in sorted(lists):
        nbest = lists[sent_id]
        specs = entities.get(sent_id, [])
        if not specs:
            # no entity evidence for this sentence: keep the likelihood winner
            selected[sent_id] = NBestList(sent_id, [nbest[0]])
            continue
        aligns = [alignments.get((sent_id, rank), empty) for rank in range(len(nbest))]
        result = rerank(nbest, aligns, specs, lexicon)
        selected[sent_id] = NBestList(sent_id, [result.selected_hypothesis])
    write_nbest(selected.values(), args.out)
    print(f"selected 1 hypothesis for each of {len(selected)} sentences to {args.out}")
    return 0


def _format_metric(value: float) -> str:
    return f"{value:.12g}"


def _write_report(report: MetricReport, path) -> None:
    lines = ["metric,value"]
    for name in ("accuracy", "f1_masculine", "f1_feminine", "delta_g"):
        lines.append(f"{name},{_format_metric(getattr(report, name))}")
    for label, count in report.gold_counts:
        lines.append(f"gold_{label},{count}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cmd_eval(args) -> int:
    testset = read_testset(args.testset)
    model = _load_model(args)
    pairs = _load_pairs(args)
    lexicon = _load_lexicon(args)
    extra = {}
    if args.rerank == "inferred":
        if args.pronouns is None or args.nouns is None:
            raise ValueError("--pronouns and --nouns are required with --rerank inferred")
        extra = {
            "pronoun_table": read_pronoun_table(args.pronouns),
            "resolver": NearestPrecedingNounResolver(read_word_list(args.nouns)),
        }
    report = evaluate_pipeline(
        testset, model, pairs, lexicon,
        constrain=args.constrain == "on",
        rerank_mode=args.rerank,
        cfg=_beam_config(args),
        **extra,
    )
    _write_report(report, args.report)
    print(f"sentences: {len(testset)}")
    for name in ("accuracy", "f1_masculine", "f1_feminine", "delta_g"):
        print(f"{name}: {_format_metric(getattr(report, name))}")
    return 0


def _cmd_sweep(args) -> int:
    testset = read_testset(args.testset)
    model = _load_model(args)
    pairs = _load_pairs(args)
    lexicon = _load_lexicon(args)
    widths = [int(field) for field in args.widths.split(",") if field.strip()]
    rows = beam_sweep(testset, model, pairs, lexicon, widths, max_len=args.max_len)
    lines = ["beam_width,accuracy"]
    lines.extend(f"{width},{_format_metric(accuracy)}" for width, accuracy in rows)
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    for line in lines[1:]:
        print(line)
    return 0


def _cmd_synth(args) -> int:
    paths = write_benchmark(build_benchmark(args.seed), Path(args.out_dir))
    for name in sorted(paths):
        print(f"{name}: {paths[name]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genderbeam",
        description="Gendered reinflection lattices, constrained decoding, agreement reranking, and evaluation.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    pairs_p = sub.add_parser("pairs", help="build reinflection pairs from a lexicon")
    pairs_p.add_argument("--lexicon", required=True)
    _add_patterns_flag(pairs_p)
    pairs_p.add_argument("--out", required=True)
    pairs_p.set_defaults(handler=_cmd_pairs)

    lattice_p = sub.add_parser("lattice", help="compose a pair set with one hypothesis")
    lattice_p.add_argument("--pairs", required=True)
    lattice_p.add_argument("--hyp", required=True, help="hypothesis sentence (quoted)")
    lattice_p.add_argument("--lexicon", default=None, help="optional, analyzes identity-arc gender")
    _add_patterns_flag(lattice_p)
    lattice_p.add_argument("--out", required=True)
    lattice_p.set_defaults(handler=_cmd_lattice)

    decode_p = sub.add_parser("decode", help="unconstrained beam search over a source file")
    _add_model_flags(decode_p)
    decode_p.add_argument("--src", required=True, help="one tokenized sentence per line")
    _add_beam_flags(decode_p)
    decode_p.add_argument("--out", required=True)
    decode_p.set_defaults(handler=_cmd_decode)

    two_pass_p = sub.add_parser("two-pass", help="1-best decode, then constrained search over its gendered lattice")
    _add_model_flags(two_pass_p)
    two_pass_p.add_argument("--pairs", required=True)
    two_pass_p.add_argument("--src", required=True, help="one tokenized sentence per line")
    two_pass_p.add_argument("--lexicon", default=None, help="optional, analyzes identity-arc gender")
    _add_patterns_flag(two_pass_p)
    _add_beam_flags(two_pass_p)
    two_pass_p.add_argument("--out", required=True)
    two_pass_p.set_defaults(handler=_cmd_two_pass)

    rerank_p = sub.add_parser("rerank", help="pick the agreement-maximizing hypothesis per sentence")
    rerank_p.add_argument("--nbest", required=True)
    rerank_p.add_argument("--align", required=True)
    rerank_p.add_argument("--entities", required=True)
    rerank_p.add_argument("--lexicon", required=True)
    _add_patterns_flag(rerank_p)
    rerank_p.add_argument("--out", required=True)
    rerank_p.set_defaults(handler=_cmd_rerank)

    eval_p = sub.add_parser("eval", help="score a labelled test set end to end")
    eval_p.add_argument("--testset", required=True)
    _add_model_flags(eval_p)
    eval_p.add_argument("--pairs", required=True)
    eval_p.add_argument("--lexicon", required=True)
    _add_patterns_flag(eval_p)
    eval_p.add_argument("--constrain", choices=("on", "off"), required=True)
    eval_p.add_argument("--rerank", choices=("off", "oracle", "inferred"), required=True)
    _add_beam_flags(eval_p)
    eval_p.add_argument("--pronouns", default=None, help="pronoun gender table, required for --rerank inferred")
    eval_p.add_argument("--nouns", default=None, help="known-noun list, required for --rerank inferred")
    eval_p.add_argument("--report", required=True, help="metric CSV output path")
    eval_p.set_defaults(handler=_cmd_eval)

    sweep_p = sub.add_parser("sweep", help="oracle-rerank accuracy across beam widths")
    sweep_p.add_argument("--testset", required=True)
    _add_model_flags(sweep_p)
    sweep_p.add_argument("--pairs", required=True)
    sweep_p.add_argument("--lexicon", required=True)
    _add_patterns_flag(sweep_p)
    sweep_p.add_argument("--widths", required=True, help="comma-separated ascending widths, e.g. 4,8,12,16,20")
    sweep_p.add_argument("--max-len", type=int, default=128)
    sweep_p.add_argument("--out", required=True, help="CSV output path")
    sweep_p.set_defaults(handler=_cmd_sweep)

    synth_p = sub.add_parser("synth", help="materialize the bundled synthetic benchmark")
    synth_p.add_argument("--out-dir", required=True)
    synth_p.add_argument("--seed", type=int, default=0)
    synth_p.set_defaults(handler=_cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (GenderBeamError, OSError, ValueError) as exc:
        print(f"genderbeam: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
