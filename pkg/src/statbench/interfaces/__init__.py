"""CLI, file formats and the environment wire protocol."""
