"""
Text formatting for terminal output and report files.
Renders metric tables with tabulate and progress/status lines for long runs.
"""

import logging
import math
from typing import Any, Dict, Optional, Sequence

from tabulate import tabulate

logger = logging.getLogger(__name__)


class TableFormatter:
    """
    Formats rows of metrics as aligned text tables.
    """

    def __init__(self, float_digits: int = 3, max_rows_display: int = 200):
        """
        Initialize the table formatter.

        Args:
            float_digits: Digits after the decimal point for floats
            max_rows_display: Maximum rows printed before truncating
        """
        self.float_digits = float_digits
        self.max_rows_display = max_rows_display

        self.table_formats = {
            'grid': 'grid',
            'simple': 'simple',
            'github': 'github',
            'markdown': 'pipe',
            'plain': 'plain',
        }

    def format_value(self, value: Any) -> str:
        """
        Format a single cell.

        Args:
            value: Cell value

        Returns:
            Display string; missing values render as ``n/a``
        """
        if value is None:
            return 'n/a'
        if isinstance(value, bool):
            return 'yes' if value else 'no'
        if isinstance(value, float):
            if math.isnan(value):
                return 'n/a'
            return f"{value:.{self.float_digits}f}"
        return str(value)

    def format_table(self,
                     columns: Sequence[str],
                     rows: Sequence[Sequence[Any]],
                     style: str = 'simple',
                     title: Optional[str] = None) -> str:
        """
        Render rows under the given headers.

        Args:
            columns: Header names
            rows: Row values
            style: Key of ``table_formats``
            title: Optional heading printed above the table

        Returns:
            Table text
        """
        if not rows:
            return f"{title}\n(no rows)" if title else "(no rows)"

        shown = rows[:self.max_rows_display]
        body = tabulate(
            [[self.format_value(v) for v in row] for row in shown],
            headers=list(columns),
            tablefmt=self.table_formats.get(style, 'simple'),
            numalign='right',
            stralign='left',
            disable_numparse=True,
        )
        if len(rows) > len(shown):
            body += f"\n... {len(rows) - len(shown)} more rows"
        return f"{title}\n{body}" if title else body

    def format_mean_ci(self, mean: Optional[float], half_width: Optional[float]) -> str:
        if mean is None or (isinstance(mean, float) and math.isnan(mean)):
            return 'n/a'
        if half_width is None or (isinstance(half_width, float) and math.isnan(half_width)):
            return self.format_value(float(mean))
        return f"{mean:.{self.float_digits}f} ± {half_width:.{self.float_digits}f}"

    def format_error(self, error: str, suggestion: Optional[str] = None) -> str:
        output = [f"Error: {error}"]
        if suggestion:
            output.append(f"Suggestion: {suggestion}")
        return '\n'.join(output)

    def format_success(self, message: str, details: Optional[Dict[str, Any]] = None) -> str:
        output = [f"Success: {message}"]
        if details:
            for key, value in details.items():
                output.append(f"  - {key}: {self.format_value(value)}")
        return '\n'.join(output)


class ProgressFormatter:
    """
    Formats progress indicators for training and sequence runs.
    """

    def format_progress_bar(self, current: int, total: int, width: int = 30) -> str:
        """
        Create a progress bar string.

        Args:
            current: Current progress value
            total: Total value
            width: Width of the bar in characters

        Returns:
            Progress bar string
        """
        percent = 0.0 if total <= 0 else min(100.0, 100.0 * current / total)
        filled = int(width * percent / 100)
        bar = '#' * filled + '-' * (width - filled)
        return f"[{bar}] {percent:5.1f}% ({current}/{total})"

    def format_step(self, step_num: int, total_steps: int, description: str) -> str:
        return f"Step [{step_num}/{total_steps}]: {description}"

    def format_duration(self, seconds: float) -> str:
        """
        Human-readable duration.

        Args:
            seconds: Duration in seconds

        Returns:
            Duration string
        """
        if seconds < 1:
            return f"{seconds * 1000:.0f}ms"
        if seconds < 60:
            return f"{seconds:.1f}s"
        if seconds < 3600:
            return f"{int(seconds // 60)}m {int(seconds % 60)}s"
        return f"{int(seconds // 3600)}h {int((seconds % 3600) // 60)}m"

    def format_steps(self, env_steps: int) -> str:
        """Compact step counts: 950, 12.5k, 3.00M."""
        if env_steps >= 1_000_000:
            return f"{env_steps / 1_000_000:.2f}M"
        if env_steps >= 1_000:
            return f"{env_steps / 1_000:.1f}k"
        return str(env_steps)


# Singleton instances for convenience
table_formatter = TableFormatter()
progress_formatter = ProgressFormatter()
