"""Registry behavior and the per-language data deltas."""

import pytest

from support import C, CPP, JAVA
from xcheck.profiles import (
    DuplicateName,
    LanguageProfile,
    MalformedProfile,
    Registry,
    UnknownLanguage,
    builtin_registry,
    parse_profile_text,
    profile_for,
)

MINI_PROFILE_TEXT = """\
# toy language for registry tests
name = mini
extensions = .mini .mn
line_comment = //
operators = . == != < > = ! && || ++ --
keywords = if else while for do switch case default
deref_ops = .
null_literals = nil
stmt_terminator = ;
"""


def test_profile_for_by_name():
    assert profile_for("java").name == "java"
    assert profile_for("cpp").name == "cpp"


def test_profile_for_by_path_extension():
    assert profile_for("src/object.c").name == "c"
    assert profile_for("deep/dir/Thing.java").name == "java"
    assert profile_for("x.CC".lower()).name == "cpp"


def test_header_files_default_to_c():
    assert profile_for("include/foo.h").name == "c"


def test_unknown_language_lists_known_names():
    with pytest.raises(UnknownLanguage) as exc:
        profile_for("file.xyz")
    assert "c" in str(exc.value) and "java" in str(exc.value)


def test_name_takes_precedence_over_extension():
    registry = builtin_registry()
    # "c" resolves as a name even though it has no dot at all
    assert registry.resolve("c").name == "c"


def test_register_and_resolve_round_trip():
    registry = builtin_registry()
    mini = parse_profile_text(MINI_PROFILE_TEXT)
    registry.register(mini)
    assert registry.resolve("mini") is mini
    assert registry.resolve("game.mn") is mini


def test_register_duplicate_name_rejected():
    registry = builtin_registry()
    with pytest.raises(DuplicateName):
        registry.register(C)


def test_register_empty_operator_set_rejected():
    registry = Registry()
    with pytest.raises(MalformedProfile):
        registry.register(
            LanguageProfile(
                name="broken",
                file_extensions=frozenset(),
                line_comment="//",
                block_comment=("/*", "*/"),
                string_delims=('"', "'"),
                escape_char="\\",
                operators=frozenset(),
                keywords=frozenset(),
                punctuation=frozenset(),
                stmt_terminator=";",
                deref_ops=(),
                null_literals=frozenset(),
                open_close_pairs=(("(", ")"),),
            )
        )


def test_deref_ops_must_be_operators():
    with pytest.raises(MalformedProfile):
        parse_profile_text(MINI_PROFILE_TEXT.replace("deref_ops = .", "deref_ops = =>"))


def test_unknown_profile_key_rejected():
    with pytest.raises(MalformedProfile):
        parse_profile_text(MINI_PROFILE_TEXT + "color = blue\n")


def test_builtin_language_deltas():
    # C vs C++: null literal spelling differs
    assert C.null_literals != CPP.null_literals
    assert "nullptr" in CPP.null_literals and "nullptr" not in C.null_literals
    # C++ vs Java: dereference operators and keyword sets differ
    assert CPP.deref_ops != JAVA.deref_ops
    assert "->" in CPP.deref_ops and "->" not in JAVA.deref_ops
    assert CPP.keywords != JAVA.keywords


def test_builtin_invariants():
    for profile in (C, CPP, JAVA):
        assert set(profile.deref_ops) <= profile.operators
        assert profile.stmt_terminator == ";"
        assert dict(profile.open_close_pairs) == {"(": ")", "{": "}", "[": "]"}


def test_profile_file_loading(tmp_path):
    path = tmp_path / "mini.profile"
    path.write_text(MINI_PROFILE_TEXT)
    registry = builtin_registry()
    from xcheck.profiles import load_profile_file

    mini = load_profile_file(str(path), registry)
    assert registry.resolve("mini") is mini
    assert mini.null_literals == frozenset({"nil"})
    assert mini.preprocessor_prefix is None
