"""WaveLab - numerical laboratory for the 3D wave equation with cubic convolution nonlinearity."""

__version__ = "0.1.0"
