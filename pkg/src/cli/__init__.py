"""Command-line front end and rendering."""
