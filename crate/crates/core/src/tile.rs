use crate::error::{Error, Result};

/// How pixels left over after the last whole tile are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemainderPolicy {
    /// The right/bottom remainder strip widens the last column/row of tiles.
    AbsorbIntoLast,
}

/// Partition of an image into square tiles of edge `tile_edge`, with the
/// remainder absorbed into the last row and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileGrid {
    pub tile_edge: u32,
    pub cols: u32,
    pub rows: u32,
    pub remainder_policy: RemainderPolicy,
    width: u32,
    height: u32,
}

/// One tile's pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tile {
    pub row: u32,
    pub col: u32,
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
}

impl Tile {
    pub fn shape(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    /// Raster indices (in the full image) of this tile's pixels, in raster order.
    pub fn raster_indices(&self, image_width: u32) -> impl Iterator<Item = usize> + '_ {
        let w = image_width as usize;
        (self.y..self.y + self.height).flat_map(move |y| {
            let row = y as usize * w;
            (self.x..self.x + self.width).map(move |x| row + x as usize)
        })
    }
}

/// Splits a `width`×`height` image into tiles of edge `tile_edge`.
///
/// A tile edge larger than either image side yields the single-tile grid.
pub fn tile_partition(width: u32, height: u32, tile_edge: u32) -> Result<TileGrid> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage { width, height });
    }
    if tile_edge == 0 {
        return Err(Error::ZeroParameter { name: "tile_edge" });
    }
    let (cols, rows) = if tile_edge > width || tile_edge > height {
        (1, 1)
    } else {
        (width / tile_edge, height / tile_edge)
    };
    Ok(TileGrid {
        tile_edge,
        cols,
        rows,
        remainder_policy: RemainderPolicy::AbsorbIntoLast,
        width,
        height,
    })
}

impl TileGrid {
    pub fn len(&self) -> usize {
        self.cols as usize * self.rows as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn image_size(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn tile(&self, row: u32, col: u32) -> Tile {
        let (x, w) = span(col, self.cols, self.tile_edge, self.width);
        let (y, h) = span(row, self.rows, self.tile_edge, self.height);
        Tile {
            row,
            col,
            x,
            y,
            width: w,
            height: h,
        }
    }

    /// Tiles in raster order (row-major).
    pub fn tiles(&self) -> impl Iterator<Item = Tile> + '_ {
        (0..self.rows).flat_map(move |r| (0..self.cols).map(move |c| self.tile(r, c)))
    }
}

fn span(index: u32, count: u32, edge: u32, extent: u32) -> (u32, u32) {
    if count == 1 {
        return (0, extent);
    }
    let start = index * edge;
    let len = if index + 1 == count {
        extent - start
    } else {
        edge
    };
    (start, len)
}
