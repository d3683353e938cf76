"""`python -m littlebird` runs the command-line interface."""

from littlebird.cli.app import app

if __name__ == "__main__":
    app(prog_name="littlebird")
