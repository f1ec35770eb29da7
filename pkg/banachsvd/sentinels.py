"""
Sentinel values.
"""

#: An override that was not given; see :meth:`.DecompositionConfig.merged`.
NO_VALUE = object()
