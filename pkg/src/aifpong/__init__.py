"""Active inference agents (AIF-1, DP-T, CFL-T) learning to play grid Pong."""

__version__ = "0.1.0"
