"""
Main entry point for the graph cospectrality command-line tool.
"""

from src.cli import main


if __name__ == "__main__":
    main()
