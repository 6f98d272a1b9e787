"""Lectura y escritura de señales, detectores, reportes y modelos."""
