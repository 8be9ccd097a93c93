# -*- coding: utf-8 -*-
#
# wegnerlab documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
import sys

import sphinx_rtd_theme

# The package is imported from the source tree for autodoc.
sys.path.insert(0, os.path.abspath('..'))

from wegnerlab import VERSION  # NOQA: E402

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'wegnerlab'
copyright = u'2024, the wegnerlab developers'
author = u'the wegnerlab developers'

version = '.'.join(str(v) for v in VERSION[:2])
release = '.'.join(str(v) for v in VERSION)

language = None
exclude_patterns = ['_build']
pygments_style = 'sphinx'
todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_rtd_theme"
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
html_static_path = []
htmlhelp_basename = 'wegnerlabdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}

latex_documents = [
    (master_doc, 'wegnerlab.tex', u'wegnerlab Documentation', author, 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'wegnerlab', u'wegnerlab Documentation', [author], 1)
]

texinfo_documents = [
    (master_doc, 'wegnerlab', u'wegnerlab Documentation', author, 'wegnerlab',
     'Numerical checks of Wegner estimates.', 'Miscellaneous'),
]
