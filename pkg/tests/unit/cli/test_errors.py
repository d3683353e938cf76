"""Unit tests for CLI error reporting and option parsing."""

import pytest

from littlebird.cli.errors import error_line
from littlebird.cli.options import parse_int_list, parse_name_list
from littlebird.exceptions import ArtifactIOError, ConfigurationError


class TestErrorLine:
    """Tests for error_line."""

    def test_format(self) -> None:
        """Should print the code and the quoted message."""
        line = error_line(ConfigurationError("Unknown check suites: x"))

        assert line == 'error code=CONFIG message="Unknown check suites: x"'

    def test_escapes_quotes_and_folds_newlines(self) -> None:
        """Should keep the error on a single parsable line."""
        line = error_line(ArtifactIOError('Cannot read "a.txt"\nno such file'))

        assert line == 'error code=ARTIFACT_IO message="Cannot read \\"a.txt\\" no such file"'


class TestParseLists:
    """Tests for comma-separated option parsing."""

    def test_int_list(self) -> None:
        """Should parse integers and skip empty parts."""
        assert parse_int_list("1024, 2048,", "--lengths") == [1024, 2048]

    def test_none_passes_through(self) -> None:
        """Should return None when the option is absent."""
        assert parse_int_list(None, "--lengths") is None
        assert parse_name_list(None) is None

    @pytest.mark.parametrize("raw", ["1k,2k", ",", ""])
    def test_int_list_errors(self, raw: str) -> None:
        """Should raise ConfigurationError naming the option."""
        with pytest.raises(ConfigurationError, match="--lengths"):
            parse_int_list(raw, "--lengths")

    def test_name_list(self) -> None:
        """Should strip names."""
        assert parse_name_list(" dense , littlebird") == ["dense", "littlebird"]
