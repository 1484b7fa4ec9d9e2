"""crflat: flatness analysis of proper rational CR maps between Heisenberg hypersurfaces.

Library layout: jets (weighted truncated arithmetic), maps (map specs, Cayley,
translated jets, properness), hermitian (signature-(N+1,1) form and Q-frames),
automorphisms, normalization (partial/full normal forms and geometric rank),
frames (adapted lifts and Maurer-Cartan forms), sff (second fundamental form
and the flatness verdict), service (FastAPI + pydantic), cli (thin client).
"""

__version__ = "0.1.0"
