from pvakit import version

__version__ = version.VERSION
