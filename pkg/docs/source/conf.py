#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# banachsvd documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import guzzle_sphinx_theme
from pkg_resources import DistributionNotFound, get_distribution

try:
    _release = get_distribution('banachsvd')
except DistributionNotFound:
    version = "0.0.0"
    release = "0.0.0"
else:
    version = '.'.join(_release.version.split(".")[:3])
    release = _release.version

# -- General configuration ------------------------------------------------

# Sphinx extensions
extensions = [
    # Required for autogeneration of documentation
    'sphinx.ext.autodoc',
    'sphinx.ext.autosummary',
    # Linking to other documents
    'sphinx.ext.intersphinx',
    # View the code in sphinx easily.
    'sphinx.ext.viewcode',
    # Formulas in docstrings
    'sphinx.ext.mathjax',
    'sphinx_autodoc_typehints'
]

autoclass_content = 'both'  # include both class docstring and __init__
autodoc_default_flags = [
    # Make sure that any autodoc declarations show the right members
    'members',
    'inherited-members',
    'show-inheritance',
]
autodoc_member_order = "bysource"
autosummary_generate = True  # Make _autosummary files and include them

# Add any paths that contain templates here, relative to this directory.
templates_path = ['_templates']

source_suffix = '.rst'

# The master toctree document.
master_doc = 'index'

# General information about the project.
project = 'banachsvd'
copyright = '2024, banachsvd contributors'
author = 'banachsvd contributors'

language = None

exclude_patterns = []

# The name of the Pygments (syntax highlighting) style to use.
pygments_style = 'manni'

todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme_path = guzzle_sphinx_theme.html_theme_path()
html_theme = 'guzzle_sphinx_theme'

html_static_path = ['_static']

# -- Options for HTMLHelp output ------------------------------------------

htmlhelp_basename = 'banachsvd_doc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}

latex_documents = [
    (master_doc, 'banachsvd.tex', 'banachsvd Documentation',
     author, 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'banachsvd', 'banachsvd Documentation',
     [author], 1)
]

# -- Options for Texinfo output -------------------------------------------

texinfo_documents = [
    (master_doc, 'banachsvd', 'banachsvd Documentation',
     author, 'banachsvd', 'Spectral-like decompositions between normed spaces.',
     'Miscellaneous'),
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable', None),
    'scipy': ('https://docs.scipy.org/doc/scipy', None),
}
