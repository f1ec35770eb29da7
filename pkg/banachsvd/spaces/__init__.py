"""
Normed coordinate spaces: norms, duality selections and the minimum-norm kernel.

.. currentmodule:: banachsvd.spaces

.. autosummary::
    :toctree:

    norms
    duality
    minnorm

"""
