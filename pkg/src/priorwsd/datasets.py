"""Reader and writer for phrase-similarity datasets in the canonical TSV layout.

One pair per line, tab-separated::

    id  structure  tokens1  tokens2  score  scale_max

``structure`` is SVO or VO. Tokens are space-separated ``word/ROLE`` items
with roles S, V, O in phrase order. ``score`` may be a comma-separated list
of per-annotator scores, which are averaged. Blank lines and lines starting
with ``#`` are ignored.
"""

from pathlib import Path

from .composers import STRUCTURES
from .errors import DatasetFormatError
from .evaluation import PhrasePair

ROLES = {"SVO": ("S", "V", "O"), "VO": ("V", "O")}


def _tokens(field, structure, lineno):
    toks = []
    for item in field.split():
        word, sep, role = item.rpartition("/")
        if not sep or not word or not role:
            raise DatasetFormatError(f"token {item!r} is not of the form word/ROLE", lineno)
        toks.append((word, role.upper()))
    if len(toks) != STRUCTURES[structure]:
        raise DatasetFormatError(
            f"{structure} phrase needs {STRUCTURES[structure]} tokens, got {len(toks)}", lineno
        )
    roles = tuple(r for _, r in toks)
    if roles != ROLES[structure]:
        raise DatasetFormatError(f"roles {roles} do not match {structure}", lineno)
    return tuple(toks)


def parse_line(line, lineno=None):
    fields = line.rstrip("\n").split("\t")
    if len(fields) != 6:
        raise DatasetFormatError(f"expected 6 tab-separated fields, got {len(fields)}", lineno)
    pid, structure, t1, t2, score, scale = (f.strip() for f in fields)
    structure = structure.upper()
    if structure not in STRUCTURES:
        raise DatasetFormatError(f"unknown structure tag {structure!r}", lineno)
    try:
        scores = [float(s) for s in score.split(",")]
        scale_max = float(scale)
    except ValueError:
        raise DatasetFormatError("score and scale_max must be numbers", lineno) from None
    human = sum(scores) / len(scores)
    if not 0.0 <= human <= scale_max:
        raise DatasetFormatError(f"score {human} outside [0, {scale_max}]", lineno)
    return PhrasePair(pid, structure, _tokens(t1, structure, lineno),
                      _tokens(t2, structure, lineno), human, scale_max)


def parse_dataset(path):
    pairs, ids = [], set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            pair = parse_line(line, lineno)
            if pair.id in ids:
                raise DatasetFormatError(f"duplicate pair id {pair.id!r}", lineno)
            ids.add(pair.id)
            pairs.append(pair)
    return pairs


def format_pair(pair):
    def toks(ts):
        return " ".join(f"{w}/{r}" for w, r in ts)

    return "\t".join([pair.id, pair.structure, toks(pair.tokens1), toks(pair.tokens2),
                      repr(float(pair.human_score)), repr(float(pair.scale_max))])


def write_dataset(pairs, path, header=()):
    lines = [f"# {h}" for h in header] + [format_pair(p) for p in pairs]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def dataset_words(pairs):
    """Distinct words across all pairs, in first-seen order."""
    seen = {}
    for p in pairs:
        for w, _ in p.tokens1 + p.tokens2:
            seen.setdefault(w, None)
    return list(seen)
