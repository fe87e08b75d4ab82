"""Built-in structure families."""
