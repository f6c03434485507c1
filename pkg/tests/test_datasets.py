import pytest

from priorwsd.datasets import dataset_words, parse_dataset, parse_line, write_dataset
from priorwsd.errors import DatasetFormatError

SVO_ROW = "gs1\tSVO\tman/S draw/V sword/O\tman/S attract/V sword/O\t2.5\t7"


def test_valid_svo_row():
    pair = parse_line(SVO_ROW)
    assert pair.structure == "SVO"
    assert pair.tokens1 == (("man", "S"), ("draw", "V"), ("sword", "O"))
    assert len(pair.tokens2) == 3
    assert pair.human_score == 2.5 and pair.scale_max == 7.0


def test_annotator_scores_are_averaged():
    pair = parse_line("m1\tVO\tuse/V knowledge/O\texercise/V influence/O\t1,4,7\t7")
    assert pair.human_score == 4.0


def test_arity_error_names_line(tmp_path):
    path = tmp_path / "d.tsv"
    path.write_text(SVO_ROW + "\n" + "gs2\tSVO\tman/S draw/V\tman/S draw/V\t3\t7\n")
    with pytest.raises(DatasetFormatError, match="line 2"):
        parse_dataset(path)


@pytest.mark.parametrize("row,msg", [
    ("x\tSV\ta/S b/V\ta/S b/V\t1\t7", "structure"),
    ("x\tVO\ta/V b/O\ta/V b/O\t9\t7", "outside"),
    ("x\tVO\ta/V b/O\ta/V b/O\tlots\t7", "numbers"),
    ("x\tVO\ta/O b/V\ta/V b/O\t1\t7", "roles"),
    ("x\tVO\ta b/O\ta/V b/O\t1\t7", "word/ROLE"),
    ("x\tVO\ta/V b/O\t1\t7", "6 tab-separated"),
])
def test_malformed_rows(row, msg):
    with pytest.raises(DatasetFormatError, match=msg):
        parse_line(row, 1)


def test_ten_row_file(tmp_path):
    path = tmp_path / "d.tsv"
    rows = ["# converted from somewhere"] + [
        f"p{i}\tVO\tv{i}/V o{i}/O\tw{i}/V o{i}/O\t{i % 7}\t7" for i in range(10)
    ]
    path.write_text("\n".join(rows) + "\n\n")
    pairs = parse_dataset(path)
    assert len(pairs) == 10
    assert len({p.id for p in pairs}) == 10


def test_duplicate_ids(tmp_path):
    path = tmp_path / "d.tsv"
    path.write_text(SVO_ROW + "\n" + SVO_ROW + "\n")
    with pytest.raises(DatasetFormatError, match="duplicate"):
        parse_dataset(path)


def test_round_trip(tmp_path):
    pairs = [parse_line(SVO_ROW), parse_line("m1\tVO\tuse/V knowledge/O\texercise/V influence/O\t1\t7")]
    path = tmp_path / "d.tsv"
    write_dataset(pairs, path, header=["test"])
    assert parse_dataset(path) == pairs
    assert path.read_text().startswith("# test\n")
    assert dataset_words(pairs) == ["man", "draw", "sword", "attract", "use", "knowledge",
                                    "exercise", "influence"]
