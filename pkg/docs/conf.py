# -*- coding: utf-8 -*-
#
# Darkmode documentation build configuration file.

import os
import sys

import sphinx_rtd_theme

sys.path.insert(0, os.path.abspath('../'))

from darkmode import __VERSION__  # noqa: E402

# -- General configuration ------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.mathjax']

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = 'Darkmode'
copyright = '2026, Darkmode developers'
author = 'Darkmode developers'

version = __VERSION__
release = __VERSION__

language = None

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

pygments_style = 'sphinx'

todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

html_static_path = ['_static']

htmlhelp_basename = 'Darkmodedoc'

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    (master_doc, 'Darkmode.tex', 'Darkmode Documentation', 'Darkmode developers', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'darkmode', 'Darkmode Documentation', [author], 1)
]
