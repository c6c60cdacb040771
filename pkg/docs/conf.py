# -*- coding: utf-8 -*-
#
# Configuration file for the Sphinx documentation builder.
#
# This file does only contain a selection of the most common options. For a
# full list see the documentation:
# http://www.sphinx-doc.org/en/master/config

import sphinx_rtd_theme

import coexist_ia

# -- General configuration ------------------------------------------------

extensions = ['sphinx.ext.autodoc',
              'sphinx.ext.intersphinx',
              'sphinx.ext.mathjax',
              'sphinx.ext.napoleon',
              'sphinx.ext.todo',
              'sphinx.ext.viewcode']

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'toc'

default_role = 'any'

project = 'coexist_ia'
copyright = '2026, coexist-ia developers'
author = 'coexist-ia developers'

version = str(coexist_ia.__version__)
release = version

language = 'en'

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store', 'scenarios']

pygments_style = 'sphinx'

todo_include_todos = True

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

htmlhelp_basename = 'coexist_iadoc'

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [(
    master_doc,
    'coexist_ia.tex', 'coexist_ia Documentation',
    'coexist-ia developers', 'manual'
)]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'coexist-ia', 'coexist_ia Documentation',
     [author], 1)
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable', None),
    'scipy': ('https://docs.scipy.org/doc/scipy', None),
}
