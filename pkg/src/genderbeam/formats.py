"""Interchange file formats: n-best lists, alignments, entities, test sets.

These files are the stage boundaries of the pipeline, so external tools
(real translation systems, aligners, coreference models) can replace any
built-in stage. All readers normalize to NFC; errors carry path and
1-based line number.
"""

from __future__ import annotations

import unicodedata
from typing import Iterable, Iterator, Mapping, Sequence

from .decode import Hypothesis, NBestList
from .errors import FormatError, GenderBeamError
from .evaluation import TestSentence
from .morpho import GenderLabel
from .rerank import AlignmentMap, EntitySpec

NBEST_SEPARATOR = " ||| "


def read_text(path) -> str:
    with open(path, encoding="utf-8") as handle:
        return unicodedata.normalize("NFC", handle.read())


def _data_lines(path) -> Iterator[tuple[int, str]]:
    """(lineno, line) pairs, NFC-normalized, blank and #-comment lines skipped."""
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = unicodedata.normalize("NFC", raw.rstrip("\n"))
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line


def _parse_int(text: str, path, lineno: int, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise FormatError(f"{path}:{lineno}: {what} must be an integer, got {text!r}") from None


def parse_nbest(path) -> dict[int, NBestList]:
    """Moses-style lines `sent_id ||| token sequence ||| loglik`, grouped by id."""
    groups: dict[int, list[Hypothesis]] = {}
    for lineno, line in _data_lines(path):
        fields = line.split(NBEST_SEPARATOR)
        if len(fields) != 3:
            raise FormatError(
                f"{path}:{lineno}: expected 3 fields separated by '{NBEST_SEPARATOR}', "
                f"got {len(fields)}"
            )
        sent_id = _parse_int(fields[0].strip(), path, lineno, "sent_id")
        tokens = tuple(fields[1].split())
        try:
            loglik = float(fields[2])
        except ValueError:
            raise FormatError(
                f"{path}:{lineno}: loglik must be a number, got {fields[2]!r}"
            ) from None
        groups.setdefault(sent_id, []).append(Hypothesis(tokens, loglik))
    return {sent_id: NBestList(sent_id, hyps) for sent_id, hyps in groups.items()}


def write_nbest(lists: Iterable[NBestList], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for nbest in sorted(lists, key=lambda l: l.source_id):
            for hyp in nbest:
                tokens = " ".join(hyp.tokens)
                handle.write(f"{nbest.source_id}{NBEST_SEPARATOR}{tokens}"
                             f"{NBEST_SEPARATOR}{hyp.loglik!r}\n")


def parse_alignments(path) -> dict[tuple[int, int], AlignmentMap]:
    """Pharaoh lines `sent_id<TAB>hyp_rank<TAB>0-0 1-2 ...`; links deduplicated."""
    result: dict[tuple[int, int], AlignmentMap] = {}
    for lineno, line in _data_lines(path):
        fields = line.split("\t")
        if len(fields) != 3:
            raise FormatError(f"{path}:{lineno}: expected 3 tab-separated fields, got {len(fields)}")
        sent_id = _parse_int(fields[0], path, lineno, "sent_id")
        rank = _parse_int(fields[1], path, lineno, "hyp_rank")
        links = []
        for pair in fields[2].split():
            left, sep, right = pair.partition("-")
            if not sep or not left.isdigit() or not right.isdigit():
                raise FormatError(f"{path}:{lineno}: malformed alignment pair {pair!r}")
            links.append((int(left), int(right)))
        result[(sent_id, rank)] = AlignmentMap(links)
    return result


def write_alignments(alignments: Mapping[tuple[int, int], AlignmentMap], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for (sent_id, rank), alignment in sorted(alignments.items()):
            links = " ".join(f"{s}-{t}" for s, t in sorted(alignment.links))
            handle.write(f"{sent_id}\t{rank}\t{links}\n")


def _parse_indices(text: str, path, lineno: int) -> frozenset[int]:
    indices = set()
    for part in text.split(","):
        part = part.strip()
        if not part.isdigit():
            raise FormatError(f"{path}:{lineno}: malformed token index {part!r}")
        indices.add(int(part))
    return frozenset(indices)


def read_entities(path) -> dict[int, list[EntitySpec]]:
    """Entity annotations `sent_id<TAB>gender<TAB>trigger_index<TAB>i,j,...`.

    A `-` trigger means no trigger position (named-entity mode). Multiple
    lines per sentence accumulate in file order.
    """
    result: dict[int, list[EntitySpec]] = {}
    for lineno, line in _data_lines(path):
        fields = line.split("\t")
        if len(fields) != 4:
            raise FormatError(f"{path}:{lineno}: expected 4 tab-separated fields, got {len(fields)}")
        sent_id = _parse_int(fields[0], path, lineno, "sent_id")
        trigger = None if fields[2] == "-" else _parse_int(fields[2], path, lineno, "trigger_index")
        indices = _parse_indices(fields[3], path, lineno)
        try:
            spec = EntitySpec(trigger, GenderLabel(fields[1]), indices)
        except (GenderBeamError, ValueError) as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
        result.setdefault(sent_id, []).append(spec)
    return result


def write_entities(entities: Mapping[int, Sequence[EntitySpec]], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for sent_id in sorted(entities):
            for spec in entities[sent_id]:
                trigger = "-" if spec.trigger_index is None else str(spec.trigger_index)
                indices = ",".join(str(i) for i in sorted(spec.entity_indices))
                handle.write(f"{sent_id}\t{spec.required_gender}\t{trigger}\t{indices}\n")


def read_pronoun_table(path) -> dict[str, GenderLabel]:
    """Pronoun-to-gender TSV `pronoun<TAB>gender`; later rows win on repeats."""
    table: dict[str, GenderLabel] = {}
    for lineno, line in _data_lines(path):
        fields = line.split("\t")
        if len(fields) != 2:
            raise FormatError(f"{path}:{lineno}: expected 2 tab-separated fields, got {len(fields)}")
        try:
            table[fields[0]] = GenderLabel(fields[1])
        except (GenderBeamError, ValueError) as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
    return table


def read_word_list(path) -> tuple[str, ...]:
    """One word per data line; used for known-noun lists."""
    return tuple(line.strip() for _, line in _data_lines(path))


def read_sentences(path) -> list[tuple[str, ...]]:
    """One whitespace-tokenized sentence per data line.

    Sentence ids are assigned by data-line order, starting at 0.
    """
    return [tuple(line.split()) for _, line in _data_lines(path)]


def read_testset(path) -> list[TestSentence]:
    """Rows `sent_id<TAB>gold_gender<TAB>source sentence<TAB>trigger<TAB>i,j,...`."""
    sentences = []
    for lineno, line in _data_lines(path):
        fields = line.split("\t")
        if len(fields) != 5:
            raise FormatError(f"{path}:{lineno}: expected 5 tab-separated fields, got {len(fields)}")
        sent_id = _parse_int(fields[0], path, lineno, "sent_id")
        trigger = None if fields[3] == "-" else _parse_int(fields[3], path, lineno, "trigger_index")
        indices = _parse_indices(fields[4], path, lineno)
        try:
            sentences.append(
                TestSentence(sent_id, GenderLabel(fields[1]), tuple(fields[2].split()), trigger, indices)
            )
        except (GenderBeamError, ValueError) as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
    return sentences


def write_testset(sentences: Iterable[TestSentence], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for sentence in sorted(sentences, key=lambda s: s.sent_id):
            trigger = "-" if sentence.trigger_index is None else str(sentence.trigger_index)
            indices = ",".join(str(i) for i in sorted(sentence.entity_indices))
            handle.write(
                f"{sentence.sent_id}\t{sentence.gold_gender}\t{' '.join(sentence.source)}"
                f"\t{trigger}\t{indices}\n"
            )
