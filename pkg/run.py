"""Command-line entry point."""
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

from primaldual.cli import cli  # noqa: E402

if __name__ == '__main__':
    cli()
