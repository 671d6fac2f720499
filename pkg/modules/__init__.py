# Modules package for SEM Particle Analyzer