# Purpose: FastAPI documentation configuration.
# Metadata
title = "kacward"
description = """
HTTP surface for kacward's exact solutions of the two-dimensional Ising model.
It exposes the critical point, thermodynamic sweeps, the even-subgraph polynomial, walk amplitudes and the
full verification suite.
"""
version = "0.1.0"
openapi_url = "/api/v1/openapi.json"
terms_of_service = "Local Deployment, All Rights Reserved."
tags_metadata = [
    {
        "name": "thermodynamics",
        "description": "Critical point and free energy, internal energy and specific heat sweeps."
    },
    {
        "name": "combinatorics",
        "description": "Even-subgraph polynomials and walk amplitudes on the square lattice."
    },
    {
        "name": "verification",
        "description": "Oracle-equivalence checks across every route, and configured runs."
    },
]
