"""Disaster Chains - catastrophe Markov chains: exact laws, divisibility and simulation."""
