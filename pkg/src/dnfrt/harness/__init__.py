"""Instance generators, exact verification oracles and the experiment runner."""
