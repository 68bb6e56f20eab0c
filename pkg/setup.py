#!/usr/bin/env python3
"""
Setup script for the nibbled-ellipse billiard toolkit.
"""
import json
import shutil
from pathlib import Path


EXAMPLE_TABLES = {
    "symmetric_k1.json": {
        "a": 2.0,
        "b": 1.0,
        "quadrants": {q: {"alphas": [2.0, 1.0], "betas": [0.0, 0.5]} for q in ("pp", "pm", "mp", "mm")},
    },
    "asymmetric_k2.json": {
        "a": 2.0,
        "b": 1.0,
        "quadrants": {
            "pp": {"alphas": [2.0, 1.6, 1.0], "betas": [0.0, 0.2, 0.7]},
            "pm": {"alphas": [2.0, 1.4, 1.0], "betas": [0.0, 0.3, 0.7]},
            "mp": {"alphas": [2.0, 1.5, 1.0], "betas": [0.0, 0.2, 0.6]},
            "mm": {"alphas": [2.0, 1.3, 1.0], "betas": [0.0, 0.3, 0.6]},
        },
    },
}


def create_directories():
    """Create necessary project directories."""
    directories = [
        "data",
        "data/tables",
        "reports",
        "logs",
    ]

    for directory in directories:
        Path(directory).mkdir(parents=True, exist_ok=True)

    print("✅ Created project directories")


def check_dependencies():
    """Check if required dependencies are installed."""
    try:
        import click
        import loguru
        import matplotlib
        import numpy
        import pandas
        import pydantic_settings
        print("✅ All required dependencies are installed")
        return True
    except ImportError as e:
        print(f"❌ Missing dependency: {e}")
        print("Please run: pip install -r requirements.txt")
        return False


def write_example_tables():
    """Write the example tables to data/tables (existing files are kept)."""
    for name, table in EXAMPLE_TABLES.items():
        path = Path("data/tables") / name
        if path.exists():
            print(f"ℹ️  {path} already exists")
            continue
        path.write_text(json.dumps(table, indent=2) + "\n", encoding="utf-8")
        print(f"✅ Wrote {path}")


def create_env_file():
    """Create .env file if it doesn't exist."""
    if not Path(".env").exists():
        print("📝 Creating .env file...")
        if Path(".env.example").exists():
            shutil.copy(".env.example", ".env")
        else:
            env_content = """# Application Configuration
NB_LOG_LEVEL=INFO
NB_THREADS=1

# Criterion grid
NB_GRID_SIZE=100
"""
            with open(".env", "w") as f:
                f.write(env_content)
        print("✅ Created .env file from template")
    else:
        print("ℹ️  .env file already exists")


def main():
    """Main setup function."""
    print("Setting up the nibbled-ellipse billiard toolkit...")
    print("=" * 60)

    create_directories()
    write_example_tables()
    create_env_file()
    check_dependencies()

    print("\n" + "=" * 60)
    print("✅ Setup completed successfully!")
    print("\nNext steps:")
    print("1. Install dependencies: pip install -r requirements.txt")
    print("2. Check a table: python -m src.cli table validate --table data/tables/symmetric_k1.json")
    print("3. Run: python generate_reports.py --grid 20")
    print("=" * 60)


if __name__ == "__main__":
    main()
