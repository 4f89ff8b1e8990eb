"""PNG rendering of grid-packing tables.

Row 0 is drawn at the bottom, column 0 at the left. The best monotone path
is shaded, chosen chain segments are outlined, and each cell shows its
weight.
"""

from PIL import Image, ImageDraw, ImageFont

from config import (
    RENDER_CELL_PX, RENDER_MARGIN_PX,
    FONT_PATH, FONT_PATH_REGULAR, FONT_MEDIUM, FONT_SMALL,
    COLOR_BG, COLOR_TEXT, COLOR_DIM, COLOR_GRID, COLOR_PATH, COLOR_CHAIN,
    COLOR_SEGMENT,
)

FOOTER_PX = 24


def _load_fonts():
    try:
        return (ImageFont.truetype(FONT_PATH, FONT_MEDIUM),
                ImageFont.truetype(FONT_PATH_REGULAR, FONT_SMALL))
    except OSError:
        return ImageFont.load_default(), ImageFont.load_default()


class TableRenderer:
    CELL = RENDER_CELL_PX
    MARGIN = RENDER_MARGIN_PX

    def __init__(self, m):
        self.m = m
        side = 2 * self.MARGIN + m * self.CELL
        self.W = side
        self.H = side + FOOTER_PX
        self.img = Image.new("RGB", (self.W, self.H), COLOR_BG)
        self.draw = ImageDraw.Draw(self.img)
        self.font_md, self.font_sm = _load_fonts()

    def box(self, row, col):
        """Pixel rectangle of a cell."""
        x0 = self.MARGIN + col * self.CELL
        y0 = self.MARGIN + (self.m - 1 - row) * self.CELL
        return [x0, y0, x0 + self.CELL, y0 + self.CELL]

    def render(self, t, family=None, chain=None, path=None, caption=""):
        for row, col in path or ():
            self.draw.rectangle(self.box(row, col), fill=COLOR_PATH)
        for row in range(self.m):
            for col in range(self.m):
                self.draw.rectangle(self.box(row, col), outline=COLOR_GRID)
                weight = t.cell(row, col)
                x0, y0, _, _ = self.box(row, col)
                self.draw.text((x0 + 4, y0 + 4), str(weight), font=self.font_md,
                               fill=COLOR_TEXT if weight else COLOR_DIM)
        if family is not None:
            chosen = set(chain.chosen) if chain is not None else set()
            for sid in sorted(chosen):
                self._outline(family.segment(sid), COLOR_CHAIN, 3)
            if not chosen:
                for seg in family.segments:
                    self._outline(seg, COLOR_SEGMENT, 1)
        if caption:
            self.draw.text((self.MARGIN, self.H - FOOTER_PX + 4), caption,
                           font=self.font_sm, fill=COLOR_TEXT)
        return self.img

    def _outline(self, seg, color, width):
        lo = self.box(seg.min_row, seg.min_col)
        hi = self.box(seg.max_row, seg.max_col)
        inset = width
        self.draw.rectangle(
            [lo[0] + inset, hi[1] + inset, hi[2] - inset, lo[3] - inset],
            outline=color, width=width)


def render_table(t, family=None, chain=None, path=None, caption=""):
    return TableRenderer(t.m).render(t, family, chain, path, caption)


def save_png(img, path):
    img.save(path, format="PNG")
    return path
