use crate::geometry::{Rect, Vec2};
use crate::maze::MazeLayout;

#[derive(Debug, Clone, PartialEq)]
pub struct Bin {
    pub col: usize,
    pub row: usize,
    pub rect: Rect,
    pub center: Vec2,
}

/// Regular tessellation of the arena restricted to bins the robot centre can
/// occupy. The last column and row are truncated at the arena edge, so a
/// 1.25 m tall arena with 0.10 m rows gets a half-height top row.
#[derive(Debug, Clone, PartialEq)]
pub struct BinGrid {
    pub bin_width: f64,
    pub bin_height: f64,
    pub cols: usize,
    pub rows: usize,
    pub bins: Vec<Bin>,
    cell_to_bin: Vec<Option<usize>>,
}

impl BinGrid {
    /// Corridor bins are those overlapping the region reachable by the robot
    /// centre, i.e. some corridor rectangle eroded by `body_radius`.
    pub fn new(layout: &MazeLayout, body_radius: f64, bin_width: f64, bin_height: f64) -> Self {
        let cols = (layout.width / bin_width - 1e-9).ceil() as usize;
        let rows = (layout.height / bin_height - 1e-9).ceil() as usize;
        let free: Vec<Rect> = layout.corridors.iter().filter_map(|c| c.eroded(body_radius)).collect();
        let mut bins = Vec::new();
        let mut cell_to_bin = vec![None; cols * rows];
        for row in 0..rows {
            for col in 0..cols {
                let rect = Rect::new(
                    col as f64 * bin_width,
                    row as f64 * bin_height,
                    ((col + 1) as f64 * bin_width).min(layout.width),
                    ((row + 1) as f64 * bin_height).min(layout.height),
                );
                if free.iter().any(|f| overlaps(&rect, f)) {
                    cell_to_bin[row * cols + col] = Some(bins.len());
                    bins.push(Bin {
                        col,
                        row,
                        center: rect.center(),
                        rect,
                    });
                }
            }
        }
        BinGrid {
            bin_width,
            bin_height,
            cols,
            rows,
            bins,
            cell_to_bin,
        }
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let col = ((p.x / self.bin_width).floor().max(0.0) as usize).min(self.cols - 1);
        let row = ((p.y / self.bin_height).floor().max(0.0) as usize).min(self.rows - 1);
        (col, row)
    }

    /// Corridor bin holding `p`, if the cell containing `p` is one.
    pub fn bin_at(&self, p: Vec2) -> Option<usize> {
        let (col, row) = self.cell_of(p);
        self.cell_to_bin[row * self.cols + col]
    }

    /// Corridor bin for a logged position; positions in non-corridor cells
    /// go to the nearest bin centre, lowest index on ties.
    pub fn locate(&self, p: Vec2) -> usize {
        self.bin_at(p).unwrap_or_else(|| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (i, b) in self.bins.iter().enumerate() {
                let d = b.center.dist(p);
                if d < best_d {
                    best = i;
                    best_d = d;
                }
            }
            best
        })
    }

    /// Distance between two bin centres in bin units.
    pub fn error_bins(&self, a: usize, b: usize) -> f64 {
        let (ca, cb) = (self.bins[a].center, self.bins[b].center);
        ((ca.x - cb.x) / self.bin_width).hypot((ca.y - cb.y) / self.bin_height)
    }

    pub fn bins_in(&self, r: &Rect) -> Vec<usize> {
        (0..self.bins.len()).filter(|&i| overlaps(&self.bins[i].rect, r)).collect()
    }
}

fn overlaps(a: &Rect, b: &Rect) -> bool {
    a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::canonical;

    #[test]
    fn canonical_grid_has_110_bins() {
        let g = BinGrid::new(&canonical::triple_t(), 0.037, 0.08, 0.10);
        assert_eq!((g.cols, g.rows), (20, 13));
        assert_eq!(g.len(), 110);
        let top = g.bins.iter().map(|b| b.rect.height()).fold(f64::INFINITY, f64::min);
        assert!(top > 0.09, "half-height row should hold no corridor bins");
    }

    #[test]
    fn error_in_bin_units() {
        let g = BinGrid::new(&canonical::triple_t(), 0.037, 0.08, 0.10);
        let a = g.bin_at(Vec2::new(0.05, 0.05)).unwrap();
        let b = g.bin_at(Vec2::new(0.05 + 3.0 * 0.08, 0.05)).unwrap();
        assert!((g.error_bins(a, b) - 3.0).abs() < 1e-12);
        assert_eq!(g.error_bins(a, a), 0.0);
    }
}
