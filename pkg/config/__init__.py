# Configuration package for SEM Particle Analyzer