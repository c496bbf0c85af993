"""Per-language knowledge: operators, keywords, comment syntax, dereference
operators, and null literals.

Everything else in the analyzer is language-agnostic; adding a language is a
data addition here (or a profile file loaded at runtime), not a code change.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field


class ProfileError(Exception):
    """Base class for profile registry problems."""


class UnknownLanguage(ProfileError):
    pass


class DuplicateName(ProfileError):
    pass


class MalformedProfile(ProfileError):
    pass


@dataclass(frozen=True)
class LanguageProfile:
    name: str
    file_extensions: frozenset[str]
    line_comment: str
    block_comment: tuple[str, str]
    string_delims: tuple[str, str]  # (string quote, char quote)
    escape_char: str
    operators: frozenset[str]
    keywords: frozenset[str]
    punctuation: frozenset[str]
    stmt_terminator: str
    deref_ops: tuple[str, ...]
    null_literals: frozenset[str]
    open_close_pairs: tuple[tuple[str, str], ...]
    # Lines whose first non-blank text starts with this prefix are skipped
    # like comments (with backslash continuation). None disables the rule.
    preprocessor_prefix: str | None = None


def validate_profile(profile: LanguageProfile) -> None:
    """Raise MalformedProfile when the profile's own invariants fail."""
    problems: list[str] = []
    if not profile.name:
        problems.append("name is empty")
    if not profile.operators:
        problems.append("operator set is empty")
    if any(not op for op in profile.operators):
        problems.append("operator set contains an empty string")
    if not set(profile.deref_ops) <= profile.operators:
        problems.append("deref_ops must be a subset of operators")
    if not profile.stmt_terminator:
        problems.append("stmt_terminator is empty")
    if len(profile.string_delims) != 2 or any(len(q) != 1 for q in profile.string_delims):
        problems.append("string_delims must be two single-character quotes")
    if len(profile.escape_char) != 1:
        problems.append("escape_char must be a single character")
    opens = [o for o, _ in profile.open_close_pairs]
    if len(set(opens)) != len(opens):
        problems.append("open_close_pairs has a duplicate opening token")
    if any(not o or not c for o, c in profile.open_close_pairs):
        problems.append("open_close_pairs contains an empty token")
    for ext in profile.file_extensions:
        if not ext.startswith("."):
            problems.append(f"extension {ext!r} must start with '.'")
    if problems:
        raise MalformedProfile(f"profile {profile.name!r}: " + "; ".join(problems))


class Registry:
    """Name/extension lookup for language profiles.

    Built once at startup; dynamic registration is supported only before
    analysis begins, after which reads are safe from any thread.
    """

    def __init__(self) -> None:
        self._by_name: dict[str, LanguageProfile] = {}
        self._by_ext: dict[str, LanguageProfile] = {}

    def register(self, profile: LanguageProfile) -> None:
        validate_profile(profile)
        if profile.name in self._by_name:
            raise DuplicateName(f"language {profile.name!r} is already registered")
        for ext in profile.file_extensions:
            if ext in self._by_ext:
                raise DuplicateName(
                    f"extension {ext!r} is already claimed by {self._by_ext[ext].name!r}"
                )
        self._by_name[profile.name] = profile
        for ext in profile.file_extensions:
            self._by_ext[ext.lower()] = profile

    def resolve(self, name_or_path: str) -> LanguageProfile:
        """Explicit language name first, then registered file extension."""
        if name_or_path in self._by_name:
            return self._by_name[name_or_path]
        ext = os.path.splitext(name_or_path)[1].lower()
        if ext in self._by_ext:
            return self._by_ext[ext]
        known = ", ".join(sorted(self._by_name))
        raise UnknownLanguage(f"no profile for {name_or_path!r} (registered: {known})")

    def names(self) -> list[str]:
        return sorted(self._by_name)


# --------------------------------------------------------------------------
# Built-in profiles
# --------------------------------------------------------------------------

_BRACKET_PAIRS = (("(", ")"), ("{", "}"), ("[", "]"))

_C_OPERATORS = (
    "...", "<<=", ">>=",
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "^=", "|=",
    "+", "-", "*", "/", "%", "<", ">", "=", "!", "&", "|", "^", "~", ".",
)

_C_KEYWORDS = (
    "auto break case char const continue default do double else enum extern "
    "float for goto if inline int long register restrict return short signed "
    "sizeof static struct switch typedef union unsigned void volatile while "
    "_Alignas _Alignof _Atomic _Bool _Complex _Generic _Imaginary _Noreturn "
    "_Static_assert _Thread_local"
).split()

_CPP_KEYWORDS = (
    "alignas alignof and and_eq asm auto bitand bitor bool break case catch "
    "char char16_t char32_t class compl const constexpr const_cast continue "
    "decltype default delete do double dynamic_cast else enum explicit export "
    "extern false float for friend goto if inline int long mutable namespace "
    "new noexcept not not_eq nullptr operator or or_eq private protected "
    "public register reinterpret_cast return short signed sizeof static "
    "static_assert static_cast struct switch template this thread_local throw "
    "true try typedef typeid typename union unsigned using virtual void "
    "volatile wchar_t while xor xor_eq"
).split()

_JAVA_KEYWORDS = (
    "abstract assert boolean break byte case catch char class const continue "
    "default do double else enum extends final finally float for goto if "
    "implements import instanceof int interface long native new package "
    "private protected public return short static strictfp super switch "
    "synchronized this throw throws transient try void volatile while "
    "true false null"
).split()

_JAVA_OPERATORS = (
    ">>>=", "<<=", ">>=", ">>>", "...",
    "->", "::", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "^=", "|=",
    "+", "-", "*", "/", "%", "<", ">", "=", "!", "&", "|", "^", "~", ".",
)

_C_PUNCTUATION = frozenset("(){}[];,:?")


def _c_profile() -> LanguageProfile:
    return LanguageProfile(
        name="c",
        file_extensions=frozenset({".c", ".h"}),
        line_comment="//",
        block_comment=("/*", "*/"),
        string_delims=('"', "'"),
        escape_char="\\",
        operators=frozenset(_C_OPERATORS),
        keywords=frozenset(_C_KEYWORDS),
        punctuation=_C_PUNCTUATION,
        stmt_terminator=";",
        deref_ops=("->", "."),
        null_literals=frozenset({"NULL"}),
        open_close_pairs=_BRACKET_PAIRS,
        preprocessor_prefix="#",
    )


def _cpp_profile() -> LanguageProfile:
    return LanguageProfile(
        name="cpp",
        file_extensions=frozenset({".cpp", ".cc", ".cxx", ".hpp", ".hh", ".hxx"}),
        line_comment="//",
        block_comment=("/*", "*/"),
        string_delims=('"', "'"),
        escape_char="\\",
        operators=frozenset(_C_OPERATORS + ("::", "->*", ".*")),
        keywords=frozenset(_CPP_KEYWORDS),
        punctuation=_C_PUNCTUATION,
        stmt_terminator=";",
        deref_ops=("->", "."),
        null_literals=frozenset({"NULL", "nullptr"}),
        open_close_pairs=_BRACKET_PAIRS,
        preprocessor_prefix="#",
    )


def _java_profile() -> LanguageProfile:
    return LanguageProfile(
        name="java",
        file_extensions=frozenset({".java"}),
        line_comment="//",
        block_comment=("/*", "*/"),
        string_delims=('"', "'"),
        escape_char="\\",
        operators=frozenset(_JAVA_OPERATORS),
        keywords=frozenset(_JAVA_KEYWORDS),
        punctuation=_C_PUNCTUATION | {"@"},
        stmt_terminator=";",
        deref_ops=(".",),
        null_literals=frozenset({"null"}),
        open_close_pairs=_BRACKET_PAIRS,
    )


def builtin_registry() -> Registry:
    """A fresh registry holding the built-in C, C++, and Java profiles."""
    registry = Registry()
    for profile in (_c_profile(), _cpp_profile(), _java_profile()):
        registry.register(profile)
    return registry


DEFAULT_REGISTRY = builtin_registry()


def profile_for(name_or_path: str, registry: Registry | None = None) -> LanguageProfile:
    return (registry or DEFAULT_REGISTRY).resolve(name_or_path)


def register_profile(profile: LanguageProfile, registry: Registry | None = None) -> None:
    (registry or DEFAULT_REGISTRY).register(profile)


# --------------------------------------------------------------------------
# Profile definition files
# --------------------------------------------------------------------------
#
# One language per file, `key = value` lines, `#` starts a comment line,
# list values are whitespace-separated.  Example:
#
#     name = mini
#     extensions = .mini .mn
#     line_comment = //
#     block_comment = /* */
#     string_delims = " '
#     escape = \
#     operators = . == != < > = ! && ||
#     keywords = if else while for
#     punctuation = ( ) { } [ ] ; ,
#     stmt_terminator = ;
#     deref_ops = .
#     null_literals = nil
#     pairs = ( ) { } [ ]
#     preprocessor = #

_LIST_KEYS = {
    "extensions", "operators", "keywords", "punctuation",
    "deref_ops", "null_literals", "pairs", "block_comment", "string_delims",
}
_SCALAR_KEYS = {"name", "line_comment", "escape", "stmt_terminator", "preprocessor"}


def parse_profile_text(text: str) -> LanguageProfile:
    values: dict[str, list[str] | str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("# "):
            continue
        if "=" not in line:
            raise MalformedProfile(f"profile file line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in _LIST_KEYS:
            values[key] = value.split()
        elif key in _SCALAR_KEYS:
            values[key] = value
        else:
            raise MalformedProfile(f"profile file line {lineno}: unknown key {key!r}")

    def scalar(key: str, default: str | None = None) -> str:
        got = values.get(key, default)
        if got is None:
            raise MalformedProfile(f"profile file is missing required key {key!r}")
        assert isinstance(got, str)
        return got

    def listval(key: str, default: list[str] | None = None) -> list[str]:
        got = values.get(key, default)
        if got is None:
            raise MalformedProfile(f"profile file is missing required key {key!r}")
        assert isinstance(got, list)
        return got

    block = listval("block_comment", ["/*", "*/"])
    if len(block) != 2:
        raise MalformedProfile("block_comment needs exactly two tokens (open close)")
    quotes = listval("string_delims", ['"', "'"])
    if len(quotes) != 2:
        raise MalformedProfile("string_delims needs exactly two tokens (string char)")
    pair_tokens = listval("pairs", ["(", ")", "{", "}", "[", "]"])
    if len(pair_tokens) % 2:
        raise MalformedProfile("pairs needs an even number of tokens")
    pairs = tuple(
        (pair_tokens[i], pair_tokens[i + 1]) for i in range(0, len(pair_tokens), 2)
    )
    profile = LanguageProfile(
        name=scalar("name"),
        file_extensions=frozenset(listval("extensions", [])),
        line_comment=scalar("line_comment", "//"),
        block_comment=(block[0], block[1]),
        string_delims=(quotes[0], quotes[1]),
        escape_char=scalar("escape", "\\"),
        operators=frozenset(listval("operators")),
        keywords=frozenset(listval("keywords", [])),
        punctuation=frozenset(listval("punctuation", list("(){}[];,:?"))),
        stmt_terminator=scalar("stmt_terminator", ";"),
        deref_ops=tuple(listval("deref_ops", [])),
        null_literals=frozenset(listval("null_literals", [])),
        open_close_pairs=pairs,
        preprocessor_prefix=values.get("preprocessor") or None,  # type: ignore[arg-type]
    )
    validate_profile(profile)
    return profile


def load_profile_file(path: str, registry: Registry | None = None) -> LanguageProfile:
    """Parse a profile definition file and register it."""
    with open(path, encoding="utf-8") as fh:
        profile = parse_profile_text(fh.read())
    register_profile(profile, registry)
    return profile
