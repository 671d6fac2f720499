# Utilities package for SEM Particle Analyzer