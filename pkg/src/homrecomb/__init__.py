"""Exact homological algebra for recombined Lefschetz fibrations."""
