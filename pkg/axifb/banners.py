"""ASCII banners for the axifb CLI."""

from rich.console import Console
from rich.panel import Panel
from rich.text import Text

MAIN_BANNER = r"""
   ___   _  __ ____ ____ ___
  / _ | | |/_//  _// __// _ )
 / __ |_>  < _/ / / _/ / _  |
/_/ |_/_/|_|/___//_/  /____/
"""

COMMAND_TITLES = {
    "profile": "Heteroclinic Profile",
    "catenoid": "Catenoid Profile",
    "relax": "Gradient Flow Relaxation",
    "mpass": "Mountain-Pass Minimax",
    "fbfit": "Free-Boundary Asymptotic Fit",
    "blowup": "Blow-up Rescaling",
    "pipeline": "Full Construction Pipeline",
    "verify": "Lemma Verifier",
    "version": "Version Information",
}


def print_main_banner(console: Console = None):
    """Print the main banner with info about the tool."""
    console = console or Console()
    banner_text = Text(MAIN_BANNER, style="cyan bold")
    description = Text(
        "\nNumerical workbench for axisymmetric one-phase free boundaries",
        style="white",
    )
    description.justify = "center"
    banner_text.append(description)
    try:
        from axifb import __version__
        banner_text.append(Text(f"\nv{__version__}", style="green"))
    except ImportError:
        pass
    console.print(Panel(banner_text, expand=False, border_style="cyan", padding=(1, 2)))


def print_command_banner(command: str, console: Console = None):
    """Print a titled banner for a subcommand; unknown commands print nothing."""
    console = console or Console()
    title = COMMAND_TITLES.get(command)
    if title is None:
        return
    console.print(Panel(
        Text(MAIN_BANNER, style="cyan bold"),
        title=title,
        expand=False,
        border_style="cyan",
        padding=(0, 2),
    ))
