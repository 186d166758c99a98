# core package: polyhedra, homology, census, cancellation, kirby data, encodings
