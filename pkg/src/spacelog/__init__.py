"""spacelog: time-expanded multicommodity network-flow MILPs for space
logistics campaigns, with a commodity-packing preprocessor, three model
fidelities (prefixed / full-size / multi-fidelity) and a bundled exact
reference solver."""

__version__ = "0.1.0"
