"""Allow running the hash family calculator as python -m src.hashbounds."""

from src.hashbounds.cli import main

main()
