"""
Display module for behaviorprint
Formats pipeline summaries for the terminal
"""

from typing import Dict, List, Sequence

from .cluster import ClusterReport
from .ingest import DatasetStats
from .miner import Pattern
from .pipeline import BoundaryOutcome
from .stats import StabilityReport


# ANSI color codes for terminal output
class Colors:
    RESET = '\033[0m'
    RED = '\033[31m'
    GREEN = '\033[32m'
    YELLOW = '\033[33m'
    BLUE = '\033[34m'
    PURPLE = '\033[35m'
    CYAN = '\033[36m'
    WHITE = '\033[37m'
    BOLD = '\033[1m'


class NoColors:
    RESET = RED = GREEN = YELLOW = BLUE = PURPLE = CYAN = WHITE = BOLD = ''


MEASURE_NAMES = {
    "js_divergence": "Jensen-Shannon",
    "cosine_distance": "Cosine",
}


class ReportFormatter:
    """Formats and prints pipeline results"""

    def __init__(self, color: bool = True, bar_width: int = 30):
        self.colors = Colors if color else NoColors
        self.bar_width = bar_width

    def display_stats(self, stats: DatasetStats):
        """Dataset shape"""
        c = self.colors
        self._print_lines([
            f"{c.BOLD}Dataset{c.RESET}",
            self._format_info_line("Students", str(stats.n_students), c.GREEN),
            self._format_info_line("Topics", str(stats.n_topics), c.YELLOW),
            self._format_info_line("Sessions", f"{stats.max_sessions_per_student} max per student", c.BLUE),
            self._format_info_line("Records", self._format_number(stats.n_records), c.PURPLE),
        ])

    def display_sequences(self, n_sequences: int, n_users: int):
        c = self.colors
        self._print_lines([
            f"{c.BOLD}Sequences{c.RESET}",
            self._format_info_line("Sequences", str(n_sequences), c.GREEN),
            self._format_info_line("Users", str(n_users), c.YELLOW),
        ])

    def display_patterns(self, patterns: Sequence[Pattern], top: int):
        """The most frequent patterns with a support bar each"""
        c = self.colors
        lines = [f"{c.BOLD}Patterns{c.RESET}  {len(patterns)} frequent"]
        if patterns and top:
            width = max(len(p.render()) for p in patterns[:top])
            for pattern in patterns[:top]:
                bar = self._bar(pattern.support)
                lines.append(f"{c.GREEN}{pattern.render():<{width}}{c.RESET}  {c.CYAN}{bar}{c.RESET} {pattern.support:.3f}")
        self._print_lines(lines)

    def display_profiles(self, n_profiles: int, n_patterns: int):
        c = self.colors
        self._print_lines([
            f"{c.BOLD}Profiles{c.RESET}",
            self._format_info_line("Users", str(n_profiles), c.GREEN),
            self._format_info_line("Patterns", str(n_patterns), c.YELLOW),
        ])

    def display_stability(self, report: StabilityReport):
        """Self-distance against distance-to-other, one row per measure"""
        c = self.colors
        lines = [
            f"{c.BOLD}Stability{c.RESET}  {len(report.rows)} users, pairing {report.pairing}",
            f"{'Measure':<16}{'Self':>8}{'Other':>8}{'t':>9}{'p':>11}",
        ]
        for summary in report.summaries.values():
            color = c.GREEN if summary.p < 0.05 else c.YELLOW
            lines.append(
                f"{MEASURE_NAMES.get(summary.measure, summary.measure):<16}"
                f"{summary.self_distance:>8.3f}{summary.distance_to_other:>8.3f}"
                f"{summary.t:>9.2f}{color}{self._format_p_value(summary.p):>11}{c.RESET}"
            )
        if report.excluded:
            lines.append(f"{c.RED}excluded{c.RESET}  {', '.join(report.excluded)}")
        self._print_lines(lines)

    def display_clusters(self, report: ClusterReport, top: int = 3):
        """Cluster sizes and the patterns each cluster uses most"""
        c = self.colors
        lines = [f"{c.BOLD}Clusters{c.RESET}"]
        for summary in report.clusters:
            ranked = sorted(zip(report.patterns, summary.mean_frequency), key=lambda pv: (-pv[1], pv[0]))
            dominant = ", ".join(f"{name} ({value:.2f})" for name, value in ranked[:top])
            lines.append(self._format_info_line(f"Cluster #{summary.index}", f"{len(summary.members)} users", c.GREEN))
            lines.append(f"  {c.CYAN}{dominant}{c.RESET}")
        self._print_lines(lines)

    def display_boundaries(self, outcomes: Sequence[BoundaryOutcome]):
        c = self.colors
        lines = [
            f"{c.BOLD}Boundary rules{c.RESET}",
            f"{'Variant':<18}{'Sequences':>10}{'Mean len':>10}{'Patterns':>10}",
        ]
        for o in outcomes:
            lines.append(f"{o.variant:<18}{o.n_sequences:>10}{o.mean_length:>10.2f}{o.n_patterns:>10}")
        self._print_lines(lines)

    def display_files(self, files: Dict[str, str]):
        c = self.colors
        lines = [f"{c.BOLD}Wrote{c.RESET}"]
        lines += [self._format_info_line(name, path, c.WHITE) for name, path in files.items()]
        self._print_lines(lines)

    def display_error(self, message: str):
        c = self.colors
        print(f"{c.RED}Error:{c.RESET} {message}")

    def _format_info_line(self, label: str, value: str, color: str) -> str:
        """Create consistently formatted label-value pairs"""
        min_padding = 2
        max_label_width = 12

        padding = max(max_label_width - len(label) + min_padding, min_padding)
        c = self.colors
        return f"{c.BOLD}{label}{c.RESET}{' ' * padding}{color}{value}{c.RESET}"

    def _bar(self, fraction: float) -> str:
        filled = int(round(fraction * self.bar_width))
        return "█" * filled + "·" * (self.bar_width - filled)

    def _format_number(self, n: int) -> str:
        """Convert large numbers to readable format (1.2M, 15.3K)"""
        if n >= 1000000:
            return f"{n / 1000000:.1f}M"
        elif n >= 1000:
            return f"{n / 1000:.1f}K"
        return str(n)

    def _format_p_value(self, p: float) -> str:
        return "< 0.001" if p < 0.001 else f"{p:.3f}"

    def _print_lines(self, lines: List[str]):
        for line in lines:
            print(line)
        print()
