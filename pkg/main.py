"""
Command-line entry point
"""
from hardygap.main import create_cli

# Create the command group
cli = create_cli()

if __name__ == "__main__":
    cli()
