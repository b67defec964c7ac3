"""Packaged default settings and example flow specifications for bubforge."""
