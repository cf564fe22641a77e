"""pregcare: maternal-care dispatch server, registry, and client tooling."""

__version__ = "0.1.0"
